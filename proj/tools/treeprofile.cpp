// treeprofile command-line front end.
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical or feasibility error.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "treeprofile/benchmark.hpp"
#include "treeprofile/distprofile.hpp"
#include "treeprofile/experiments.hpp"
#include "treeprofile/genfun.hpp"
#include "treeprofile/oracle.hpp"
#include "treeprofile/sampler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace treeprofile;

namespace {

constexpr const char* kVersion = "treeprofile 1.0.0";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string weights;
  std::string root_weights;
  std::size_t n = 0;
  std::size_t reps = 1;
  std::string seed;
  int jobs = 0;
  std::string out;
  double bins = 0.1;
  std::string format = "csv";
  std::string tree;
  std::string config;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string render(const std::string& format) const {
    if (format == "json") {
      json arr = json::array();
      for (const auto& r : rows) {
        json o = json::object();
        for (std::size_t j = 0; j < columns.size(); ++j) {
          // numbers stay numbers
          char* end = nullptr;
          const double v = std::strtod(r[j].c_str(), &end);
          if (!r[j].empty() && end && *end == '\0')
            o[columns[j]] = r[j].find_first_of(".eEn") == std::string::npos ? json(std::stoll(r[j])) : json(v);
          else o[columns[j]] = r[j];
        }
        arr.push_back(o);
      }
      return arr.dump(2) + "\n";
    }
    std::string s;
    for (std::size_t j = 0; j < columns.size(); ++j) s += (j ? "," : "") + columns[j];
    s += '\n';
    for (const auto& r : rows) {
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (j) s += ',';
        const bool quote = r[j].find(',') != std::string::npos;
        s += quote ? "\"" + r[j] + "\"" : r[j];
      }
      s += '\n';
    }
    return s;
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}
std::string num(std::int64_t v) { return std::to_string(v); }
std::string num(std::size_t v) { return std::to_string(v); }

Table from_numeric(const std::vector<std::string>& cols, const std::vector<std::vector<double>>& rows) {
  Table t{cols, {}};
  for (const auto& r : rows) {
    std::vector<std::string> s;
    for (double v : r) s.push_back(num(v));
    t.rows.push_back(std::move(s));
  }
  return t;
}

json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw UsageError(std::string("cannot open ") + what + " file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("invalid JSON in ") + what + " file '" + path + "': " + e.what());
  }
}

std::uint64_t resolve_seed(const std::string& flag) {
  std::string s = flag;
  if (s.empty()) {
    const char* env = std::getenv("TREEPROFILE_SEED");
    s = env ? env : "1";
  }
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("--seed: not an integer: '" + s + "'");
  }
}

class Run {
 public:
  Run(std::string command, const Common& c, std::vector<std::string> argv)
      : command_(std::move(command)), c_(c), argv_(std::move(argv)), seed_(resolve_seed(c.seed)) {
    if (c_.format != "csv" && c_.format != "json") throw UsageError("--format must be csv or json, got '" + c_.format + "'");
    if (c_.jobs < 0) throw UsageError("--jobs must be >= 0");
  }

  std::uint64_t seed() const { return seed_; }
  RunOptions options() const { return {seed_, c_.jobs}; }
  const Common& common() const { return c_; }

  json weights_spec() const {
    if (c_.weights.empty()) throw UsageError("--weights is required for '" + command_ + "'");
    return read_json_file(c_.weights, "weights");
  }
  WeightSequence weights() const {
    try {
      return WeightSequence::from_json(weights_spec());
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--weights: ") + e.what());
    }
  }
  OffspringDistribution rooted_law() const {
    auto w = weights();
    if (w.kind() != WeightKind::rooted_phi) throw UsageError("--weights: '" + command_ + "' needs rooted weights");
    return criticalize(w).distribution;
  }
  std::size_t n() const {
    if (c_.n == 0) throw UsageError("--n is required and must be >= 1");
    return c_.n;
  }

  /// Writes manifest.json into --out before any results.
  void begin(json extra = json::object()) {
    if (c_.out.empty()) return;
    fs::create_directories(c_.out);
    json m = {{"tool", kVersion},
              {"command", command_},
              {"argv", argv_},
              {"seed", seed_},
              {"jobs", c_.jobs},
              {"n", c_.n},
              {"reps", c_.reps},
              {"format", c_.format}};
    if (!c_.weights.empty()) m["weights"] = weights_spec();
    if (!c_.root_weights.empty()) m["root_weights"] = read_json_file(c_.root_weights, "root weights");
    for (auto& [k, v] : extra.items()) m[k] = v;
    std::ofstream(fs::path(c_.out) / "manifest.json") << m.dump(2) << "\n";
  }

  void emit(const std::string& file, const std::string& content) const {
    if (c_.out.empty()) {
      std::cout << content;
      return;
    }
    std::ofstream f(fs::path(c_.out) / file, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + (fs::path(c_.out) / file).string());
  }
  void emit(const std::string& stem, const Table& t) const {
    emit(stem + (c_.format == "json" ? ".json" : ".csv"), t.render(c_.format));
  }

 private:
  std::string command_;
  Common c_;
  std::vector<std::string> argv_;
  std::uint64_t seed_;
};

/// Either an ordered tree (parentheses) or a labelled edge list.
struct InputTree {
  bool ordered = true;
  OrderedTree ordered_tree;
  std::optional<LabelledTree> labelled;
  Adjacency adjacency() const { return ordered ? ordered_tree.adjacency() : labelled->adjacency(); }
};

InputTree load_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("--tree: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw UsageError("--tree: empty file '" + path + "'");
  InputTree t;
  try {
    if (text[first] == '(') {
      const auto last = text.find_last_not_of(" \t\r\n");
      t.ordered_tree = OrderedTree::from_parentheses(std::string_view(text).substr(first, last - first + 1));
    } else {
      std::istringstream s(text);
      t.ordered = false;
      t.labelled = LabelledTree::from_csv(s);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError("--tree: " + std::string(e.what()));
  }
  return t;
}

InputTree tree_or_sample(const Run& run) {
  if (!run.common().tree.empty()) return load_tree(run.common().tree);
  InputTree t;
  RngStream rng(run.seed(), 0);
  t.ordered_tree = GwSampler(run.rooted_law()).conditioned(run.n(), rng);
  return t;
}

// ------------------------------------------------------------------ commands

int cmd_sample(Run& run, const std::string& sampler_name) {
  const auto kind = parse_sampler_kind(sampler_name);
  const std::size_t n = run.n();
  const std::size_t reps = run.common().reps;
  run.begin({{"sampler", to_string(kind)}});
  std::vector<std::string> lines(reps);
  std::function<std::string(RngStream&)> draw;
  if (kind == SamplerKind::rooted) {
    auto s = std::make_shared<GwSampler>(run.rooted_law());
    draw = [s, n](RngStream& rng) { return s->conditioned(n, rng).to_parentheses(); };
  } else if (kind == SamplerKind::modified) {
    if (run.common().root_weights.empty()) throw UsageError("--root-weights is required for the modified sampler");
    OffspringDistribution p0(WeightSequence::from_json(read_json_file(run.common().root_weights, "root weights")));
    auto s = std::make_shared<ModifiedGwSampler>(run.rooted_law(), p0);
    draw = [s, n](RngStream& rng) { return s->sample(n, rng).to_parentheses(); };
  } else {
    const auto w = run.weights();
    if (w.kind() != WeightKind::unrooted_w) throw UsageError("--weights: unrooted samplers need unrooted weights");
    const Marking m = kind == SamplerKind::unrooted_vertex ? Marking::vertex
                      : kind == SamplerKind::unrooted_edge ? Marking::edge
                                                           : Marking::leaf;
    auto s = std::make_shared<UnrootedSampler>(w, m);
    draw = [s, n](RngStream& rng) { return s->sample(n, rng).to_line(); };
  }
  std::exception_ptr error;
  const int threads = run.common().jobs > 0 ? run.common().jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long r = 0; r < static_cast<long>(reps); ++r) {
    try {
      RngStream rng(run.seed(), static_cast<std::uint64_t>(r));
      lines[static_cast<std::size_t>(r)] = draw(rng);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  if (run.common().format == "json") {
    run.emit("trees.json", json(lines).dump(2) + "\n");
  } else {
    std::string s;
    for (auto& l : lines) s += l + "\n";
    run.emit("trees.txt", s);
  }
  return 0;
}

int cmd_profile(Run& run, std::uint32_t root) {
  const auto t = tree_or_sample(run);
  run.begin();
  ProfileCounts p;
  if (t.ordered) p = height_profile(t.ordered_tree);
  else {
    if (root < 1 || root > t.labelled->size()) throw UsageError("--root: label " + std::to_string(root) + " not in tree");
    p = height_profile(t.labelled->rooted_at(root));
  }
  Table tab{{"k", "count"}, {}};
  for (std::size_t k = 0; k < p.counts.size(); ++k) tab.rows.push_back({num(k), num(p.counts[k])});
  run.emit("profile", tab);
  return 0;
}

int cmd_dist_profile(Run& run, const std::string& algorithm) {
  if (algorithm != "fast" && algorithm != "naive") throw UsageError("--algorithm must be fast or naive");
  const auto t = tree_or_sample(run);
  run.begin({{"algorithm", algorithm}});
  const Adjacency g = t.adjacency();
  const auto d = algorithm == "fast" ? distance_profile_fast(g, run.common().jobs) : distance_profile_naive(g);
  Table tab{{"k", "count"}, {}};
  for (std::size_t k = 0; k < d.counts.size(); ++k) tab.rows.push_back({num(k), num(d.counts[k])});
  run.emit("dist_profile", tab);
  return 0;
}

int cmd_wiener(Run& run) {
  const auto t = tree_or_sample(run);
  run.begin();
  const Adjacency g = t.adjacency();
  run.emit("wiener", Table{{"n", "wiener"}, {{num(g.size()), num(wiener_index_direct(g))}}});
  return 0;
}

int cmd_exact(Run& run) {
  const auto p = run.rooted_law();
  const std::size_t n = run.n();
  run.begin();
  const auto e = expected_profiles(p, n);
  Table tab{{"n", "k", "EL", "ELambda"}, {}};
  for (std::size_t k = 0; k < n; ++k) tab.rows.push_back({num(n), num(k), num(e.height[k]), num(e.distance[k])});
  run.emit("exact", tab);
  return 0;
}

int cmd_fourier_exact(Run& run, const std::vector<double>& xis, bool scaled) {
  const auto p = run.rooted_law();
  const std::size_t n = run.n();
  run.begin({{"xi", xis}, {"scaled", scaled}});
  Table tab{{"n", "xi", "EL2hat", "ELambda2hat"}, {}};
  for (double xi : xis) {
    const double t = scaled ? xi / std::sqrt(static_cast<double>(n)) : xi;
    const auto m = fourier_second_moments(p, n, t);
    tab.rows.push_back({num(n), num(xi), num(m.height), num(m.distance)});
  }
  run.emit("fourier_exact", tab);
  return 0;
}

int cmd_enumerate(Run& run, const std::string& kind) {
  const std::size_t n = run.n();
  Table tab{{"tree", "weight", "probability"}, {}};
  if (kind == "ordered") {
    if (n > 12) throw UsageError("--n: ordered enumeration is limited to n <= 12");
    run.begin({{"kind", kind}});
    if (run.common().weights.empty()) {
      for (const auto& t : enumerate_ordered(n)) tab.rows.push_back({t.to_parentheses(), "1", ""});
    } else {
      const auto p = run.rooted_law();
      const auto e = exact_conditioned_law(p, n);
      for (std::size_t i = 0; i < e.size(); ++i)
        tab.rows.push_back({e.items[i].to_parentheses(), num(ordered_weight(e.items[i], p)), num(e.probability(i))});
    }
  } else if (kind == "labelled") {
    if (n > 8) throw UsageError("--n: labelled enumeration is limited to n <= 8");
    run.begin({{"kind", kind}});
    if (run.common().weights.empty()) {
      for (const auto& t : enumerate_labelled(n)) tab.rows.push_back({t.to_line(), "1", ""});
    } else {
      const auto w = run.weights();
      if (w.kind() != WeightKind::unrooted_w) throw UsageError("--weights: labelled enumeration needs unrooted weights");
      const auto e = exact_labelled_law(w, n);
      for (std::size_t i = 0; i < e.size(); ++i)
        tab.rows.push_back({e.items[i].to_line(), num(labelled_weight(e.items[i], w)), num(e.probability(i))});
    }
  } else {
    throw UsageError("--kind must be ordered or labelled");
  }
  run.emit("trees", tab);
  return 0;
}

int cmd_bench(Run& run, std::vector<std::size_t> sizes, std::size_t naive_max, int repeats) {
  if (sizes.empty())
    for (int k = 10; k <= 17; ++k) sizes.push_back(std::size_t{1} << k);
  run.begin({{"sizes", sizes}});
  const auto rows = benchmark_distance_profile(sizes, run.seed(), naive_max, repeats);
  Table tab{{"n", "algorithm", "wall_ms", "checksum"}, {}};
  for (const auto& r : rows) tab.rows.push_back({num(r.n), r.algorithm, num(r.wall_ms), std::to_string(r.checksum)});
  run.emit("bench", tab);
  return 0;
}

int cmd_experiment(Run& run, const std::string& name) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) throw UsageError("unknown experiment '" + name + "'");
  json cfg = json::object();
  if (!run.common().config.empty()) cfg = read_json_file(run.common().config, "config");
  // command-line values fill in what the config leaves out
  if (!run.common().weights.empty() && !cfg.contains("weights")) cfg["weights"] = run.weights_spec();
  if (!run.common().root_weights.empty() && !cfg.contains("root_weights"))
    cfg["root_weights"] = read_json_file(run.common().root_weights, "root weights");
  if (run.common().n > 0 && !cfg.contains("n") && !cfg.contains("ns")) cfg["n"] = run.common().n;
  if (run.common().reps > 1 && !cfg.contains("reps")) cfg["reps"] = run.common().reps;
  run.begin({{"experiment", name}, {"config", cfg}});
  ExperimentOutput out;
  try {
    out = run_experiment(name, cfg, run.options());
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--config: ") + e.what());
  } catch (const json::exception& e) {
    throw UsageError(std::string("--config: ") + e.what());
  }
  run.emit("results", from_numeric(out.columns, out.rows));
  if (!run.common().out.empty()) {
    run.emit("reference", from_numeric(out.reference_columns, out.reference_rows));
    run.emit("summary.json", out.summary.dump(2) + "\n");
  } else {
    std::cerr << out.summary.dump() << "\n";
  }
  return 0;
}

void add_common(CLI::App* sub, Common& c, bool tree_input) {
  sub->add_option("--weights", c.weights, "weight specification (JSON file)");
  sub->add_option("--root-weights", c.root_weights, "root offspring weights for the modified sampler (JSON file)");
  sub->add_option("--n", c.n, "tree size");
  sub->add_option("--reps", c.reps, "replications");
  sub->add_option("--seed", c.seed, "random seed (default: $TREEPROFILE_SEED, else 1)");
  sub->add_option("--jobs", c.jobs, "worker threads (0: all)");
  sub->add_option("--out", c.out, "output directory (default: stdout)");
  sub->add_option("--bins", c.bins, "bin width in scaled units");
  sub->add_option("--format", c.format, "csv or json");
  if (tree_input) sub->add_option("--tree", c.tree, "tree file: parentheses or u,v edge CSV");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Profiles and distance profiles of random trees"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Common c;

  std::string sampler = "rooted";
  auto* sample = app.add_subcommand("sample", "draw random trees of size n");
  add_common(sample, c, false);
  sample->add_option("--sampler", sampler, "rooted|modified|unrooted_vertex|unrooted_edge|unrooted_leaf");

  std::uint32_t root = 1;
  auto* profile = app.add_subcommand("profile", "height profile of a tree");
  add_common(profile, c, true);
  profile->add_option("--root", root, "root label for edge-list input");

  std::string algorithm = "fast";
  auto* dist = app.add_subcommand("dist-profile", "distance profile of a tree");
  add_common(dist, c, true);
  dist->add_option("--algorithm", algorithm, "fast or naive");

  auto* wiener = app.add_subcommand("wiener", "Wiener index of a tree");
  add_common(wiener, c, true);

  auto* exact = app.add_subcommand("exact", "exact expected profiles from generating functions");
  add_common(exact, c, false);

  std::vector<double> xis{1.0};
  bool scaled = false;
  auto* fourier = app.add_subcommand("fourier-exact", "exact Fourier second moments");
  add_common(fourier, c, false);
  fourier->add_option("--xi", xis, "frequencies (space or comma separated)")->delimiter(',');
  fourier->add_flag("--scaled", scaled, "evaluate at xi / sqrt(n)");

  std::string kind = "ordered";
  auto* enumerate = app.add_subcommand("enumerate", "all trees of size n with weights");
  add_common(enumerate, c, false);
  enumerate->add_option("--kind", kind, "ordered or labelled");

  std::vector<std::size_t> sizes;
  std::size_t naive_max = 1u << 14;
  int repeats = 1;
  auto* bench = app.add_subcommand("bench", "distance-profile benchmark (CSV: n, algorithm, wall_ms, checksum)");
  add_common(bench, c, false);
  bench->add_option("--sizes", sizes, "tree sizes (space or comma separated)")->delimiter(',');
  bench->add_option("--naive-max", naive_max, "largest n for the naive algorithm");
  bench->add_option("--repeats", repeats, "timing repeats (minimum is reported)");

  std::string experiment;
  auto* exp = app.add_subcommand("experiment", "named Monte Carlo experiment");
  add_common(exp, c, false);
  exp->add_option("name", experiment, "experiment name")->required();
  exp->add_option("--config", c.config, "experiment configuration (JSON file)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    CLI::App* used = app.get_subcommands().front();
    Run run(used->get_name(), c, args);
    if (used == sample) return cmd_sample(run, sampler);
    if (used == profile) return cmd_profile(run, root);
    if (used == dist) return cmd_dist_profile(run, algorithm);
    if (used == wiener) return cmd_wiener(run);
    if (used == exact) return cmd_exact(run);
    if (used == fourier) return cmd_fourier_exact(run, xis, scaled);
    if (used == enumerate) return cmd_enumerate(run, kind);
    if (used == bench) return cmd_bench(run, sizes, naive_max, repeats);
    if (used == exp) return cmd_experiment(run, experiment);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
