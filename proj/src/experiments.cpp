#include "treeprofile/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include "treeprofile/distprofile.hpp"
#include "treeprofile/genfun.hpp"

namespace treeprofile {

namespace {

using nlohmann::json;

// stream ids: experiment tag in the top byte, n in the middle, replication low
std::uint64_t stream_id(std::uint64_t tag, std::size_t n, std::size_t r) {
  return (tag << 56) | (static_cast<std::uint64_t>(n) << 28) | static_cast<std::uint64_t>(r);
}

template <class R, class F>
std::vector<R> run_reps(std::size_t reps, const RunOptions& opt, std::uint64_t tag, std::size_t n, F&& f) {
  std::vector<R> out(reps);
  std::exception_ptr error;
  const int threads = opt.jobs > 0 ? opt.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long r = 0; r < static_cast<long>(reps); ++r) {
    try {
      RngStream rng(opt.seed, stream_id(tag, n, static_cast<std::size_t>(r)));
      out[static_cast<std::size_t>(r)] = f(rng);
    } catch (...) {
#pragma omp critical(treeprofile_rep_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

void check_conservation(const ProfileCounts& p, std::size_t n) {
  const auto s = std::accumulate(p.counts.begin(), p.counts.end(), std::int64_t{0});
  if (s != static_cast<std::int64_t>(n)) throw std::logic_error("profile does not sum to n");
}

void check_conservation(const DistanceProfileCounts& d, std::size_t n) {
  const auto s = std::accumulate(d.counts.begin(), d.counts.end(), std::int64_t{0});
  const auto nn = static_cast<std::int64_t>(n);
  if (s != nn * nn || d.counts.empty() || d.counts[0] != nn)
    throw std::logic_error("distance profile violates sum n^2 or Lambda(0) = n");
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t j) {
  std::vector<double> c(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) c[r] = rows[r][j];
  return c;
}

BinnedCurve binned(const TreeSource& src, std::size_t n, std::size_t reps, double bin_width, const RunOptions& opt,
                   bool distance) {
  if (reps < 2) throw std::invalid_argument("reps must be at least 2");
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
  BinnedCurve c;
  c.n = n;
  c.bin_width = bin_width;
  c.sigma = src.sigma;
  c.reps = reps;
  c.seed = opt.seed;
  const double x_max = 6.0 / src.sigma;
  const auto nbins = static_cast<std::size_t>(std::ceil(x_max / bin_width));
  for (std::size_t b = 0; b < nbins; ++b) {
    c.lo.push_back(static_cast<double>(b) * bin_width);
    c.hi.push_back(static_cast<double>(b + 1) * bin_width);
    c.reference.push_back(reference_profile_bin(src.sigma, c.lo.back(), c.hi.back()));
  }
  const double sn = std::sqrt(static_cast<double>(n));
  // (1/delta) int_lo^hi n^{-a} f(x sqrt n) dx = n^{-a-1/2} / delta * int f(t) dt
  const double scale = distance ? 1.0 / (bin_width * static_cast<double>(n) * static_cast<double>(n))
                                : 1.0 / (bin_width * static_cast<double>(n));
  auto per_rep = run_reps<std::vector<double>>(reps, opt, distance ? 2 : 1, n, [&](RngStream& rng) {
    const OrderedTree t = src.draw(n, rng);
    std::vector<std::int64_t> counts;
    if (distance) {
      auto d = distance_profile_fast(t, 1);
      check_conservation(d, n);
      counts = std::move(d.counts);
    } else {
      auto p = height_profile(t);
      check_conservation(p, n);
      counts = std::move(p.counts);
    }
    std::vector<double> v(nbins);
    for (std::size_t b = 0; b < nbins; ++b)
      v[b] = scale * integrate_interpolated(counts, c.lo[b] * sn, c.hi[b] * sn);
    return v;
  });
  for (std::size_t b = 0; b < nbins; ++b) {
    auto est = estimate_mean(column(per_rep, b), opt.seed);
    c.mean.push_back(est.value);
    c.std_error.push_back(est.std_error);
  }
  return c;
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

std::string shape_code(const Adjacency& g, Vertex v, Vertex parent) {
  std::vector<std::string> parts;
  for (Vertex u : g.neighbors(v))
    if (u != parent) parts.push_back(shape_code(g, u, v));
  std::sort(parts.begin(), parts.end());
  std::string s = "(";
  for (auto& p : parts) s += p;
  return s + ")";
}

std::int64_t max_count(const std::vector<std::int64_t>& c) { return *std::max_element(c.begin(), c.end()); }

}  // namespace

// ------------------------------------------------------------------ references

double reference_local_time_mean(double u) { return u <= 0.0 ? 0.0 : 4.0 * u * std::exp(-2.0 * u * u); }

double reference_profile_density(double sigma, double x) {
  return 0.5 * sigma * reference_local_time_mean(0.5 * sigma * x);
}

double reference_profile_bin(double sigma, double lo, double hi) {
  const double ul = std::max(0.0, 0.5 * sigma * lo), uh = std::max(0.0, 0.5 * sigma * hi);
  return (std::exp(-2.0 * ul * ul) - std::exp(-2.0 * uh * uh)) / (hi - lo);
}

double reference_width_mean(double sigma) { return sigma * std::sqrt(std::numbers::pi / 2.0); }

double reference_wiener(double sigma) { return 0.5 * std::sqrt(std::numbers::pi / 2.0) / sigma; }

double reference_fourier_tail(double eta) { return 48.0 / std::pow(eta, 4); }

double interpolation_factor(double t) {
  if (std::abs(t) < 1e-8) return 1.0 - t * t / 12.0;
  const double s = std::sin(t / 2.0) / (t / 2.0);
  return s * s;
}

// --------------------------------------------------------------- tree sources

SamplerKind parse_sampler_kind(const std::string& name) {
  if (name == "rooted") return SamplerKind::rooted;
  if (name == "modified") return SamplerKind::modified;
  if (name == "unrooted" || name == "unrooted_vertex") return SamplerKind::unrooted_vertex;
  if (name == "unrooted_edge" || name == "edge_marked") return SamplerKind::unrooted_edge;
  if (name == "unrooted_leaf" || name == "leaf_marked") return SamplerKind::unrooted_leaf;
  throw std::invalid_argument("unknown sampler '" + name + "'");
}

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::rooted: return "rooted";
    case SamplerKind::modified: return "modified";
    case SamplerKind::unrooted_vertex: return "unrooted_vertex";
    case SamplerKind::unrooted_edge: return "unrooted_edge";
    case SamplerKind::unrooted_leaf: return "unrooted_leaf";
  }
  return "?";
}

TreeSource rooted_source(const OffspringDistribution& p) {
  auto s = std::make_shared<GwSampler>(p);
  return {"rooted", p.sigma(), [s](std::size_t n, RngStream& rng) { return s->conditioned(n, rng); }};
}

TreeSource modified_source(const OffspringDistribution& p, const OffspringDistribution& p0) {
  auto s = std::make_shared<ModifiedGwSampler>(p, p0);
  return {"modified", p.sigma(), [s](std::size_t n, RngStream& rng) { return s->sample(n, rng); }};
}

TreeSource unrooted_source(const WeightSequence& w, Marking marking) {
  auto s = std::make_shared<UnrootedSampler>(w, marking);
  const char* name = marking == Marking::vertex ? "unrooted_vertex" : marking == Marking::edge ? "unrooted_edge" : "unrooted_leaf";
  return {name, s->law().sigma(), [s](std::size_t n, RngStream& rng) { return s->sample_shape(n, rng); }};
}

// ----------------------------------------------------------------- curves

CurveGate gate_curve(const BinnedCurve& c, double min_reference, double k_sigma, double rel) {
  CurveGate g;
  for (std::size_t b = 0; b < c.mean.size(); ++b) {
    if (c.reference[b] < min_reference) continue;
    ++g.bins_checked;
    const double allowed = std::max(k_sigma * c.std_error[b], rel * c.reference[b]);
    const double excess = std::abs(c.mean[b] - c.reference[b]) / allowed;
    if (excess > 1.0) ++g.failures;
    if (excess > g.worst_excess) {
      g.worst_excess = excess;
      g.worst_bin = b;
    }
  }
  g.pass = g.failures == 0 && g.bins_checked > 0;
  return g;
}

BinnedCurve exp_profile_mean(const TreeSource& src, std::size_t n, std::size_t reps, double bin_width,
                             const RunOptions& opt) {
  return binned(src, n, reps, bin_width, opt, false);
}

BinnedCurve exp_distance_profile_mean(const TreeSource& src, std::size_t n, std::size_t reps, double bin_width,
                                      const RunOptions& opt) {
  return binned(src, n, reps, bin_width, opt, true);
}

// ------------------------------------------------------------ width, wiener

WidthResult exp_width(const TreeSource& src, std::size_t n, std::size_t reps, const RunOptions& opt) {
  const double sn = std::sqrt(static_cast<double>(n));
  auto w = run_reps<double>(reps, opt, 3, n, [&](RngStream& rng) {
    auto p = height_profile(src.draw(n, rng));
    check_conservation(p, n);
    return static_cast<double>(max_count(p.counts)) / sn;
  });
  std::vector<double> w2(w.size());
  std::transform(w.begin(), w.end(), w2.begin(), [](double x) { return x * x; });
  return {n, estimate_mean(w, opt.seed), estimate_mean(w2, opt.seed), reference_width_mean(src.sigma)};
}

WienerResult exp_wiener(const TreeSource& src, std::size_t n, std::size_t reps, const RunOptions& opt) {
  const double scale = std::pow(static_cast<double>(n), -2.5);
  auto v = run_reps<double>(reps, opt, 4, n, [&](RngStream& rng) {
    const OrderedTree t = src.draw(n, rng);
    return static_cast<double>(wiener_index_direct(t.adjacency())) * scale;
  });
  return {n, estimate_mean(v, opt.seed), reference_wiener(src.sigma)};
}

// -------------------------------------------------------------- root degree

RootDegreeResult exp_root_degree(const OffspringDistribution& p, const OffspringDistribution& p0, std::size_t n,
                                 std::size_t reps, const RunOptions& opt) {
  ModifiedGwSampler sampler(p, p0);
  auto deg = run_reps<std::size_t>(reps, opt, 5, n, [&](RngStream& rng) {
    return static_cast<std::size_t>(sampler.sample(n, rng).outdegree(0));
  });
  RootDegreeResult res;
  res.n = n;
  res.limit = root_degree_limit(p0);
  const std::size_t kmax = std::max(res.limit.size(), *std::max_element(deg.begin(), deg.end()) + 1);
  res.limit.resize(kmax, 0.0);
  res.counts.assign(kmax, 0);
  for (auto d : deg) ++res.counts[d];
  std::vector<double> probs, observed;
  double outside = 0.0;
  const double total = static_cast<double>(reps);
  for (std::size_t k = 0; k < kmax; ++k) {
    res.empirical.push_back(static_cast<double>(res.counts[k]) / total);
    if (res.limit[k] > 0.0) {
      probs.push_back(res.limit[k]);
      observed.push_back(static_cast<double>(res.counts[k]));
    } else {
      outside += static_cast<double>(res.counts[k]);
    }
    if (res.limit[k] * total >= 5.0) {
      const double ratio = res.empirical[k] / res.limit[k];
      res.max_ratio = std::max(res.max_ratio, ratio);
      if (ratio > 2.5) res.dominated = false;
    }
  }
  if (probs.size() == 1) {
    // degenerate limit: nothing to test beyond the support
    res.chi = {0.0, outside > 0.0 ? 0.0 : 1.0, 0, 1};
  } else {
    res.chi = chi_square_compare(probs, observed, outside);
  }
  return res;
}

// --------------------------------------------------------------- big branch

BranchKind parse_branch_kind(const std::string& name) {
  if (name == "forest") return BranchKind::forest;
  if (name == "modified") return BranchKind::modified;
  if (name == "edge_marked") return BranchKind::edge_marked;
  throw std::invalid_argument("unknown branch kind '" + name + "'");
}

std::string to_string(BranchKind kind) {
  switch (kind) {
    case BranchKind::forest: return "forest";
    case BranchKind::modified: return "modified";
    case BranchKind::edge_marked: return "edge_marked";
  }
  return "?";
}

BigBranchResult exp_big_branch(const BigBranchConfig& cfg, const std::vector<std::size_t>& ns, std::size_t reps,
                               const RunOptions& opt) {
  if (ns.empty()) throw std::invalid_argument("big branch needs at least one n");
  BigBranchResult res;
  res.kind = cfg.kind;
  GwSampler gw(cfg.p);
  std::unique_ptr<ModifiedGwSampler> mod;
  if (cfg.kind == BranchKind::modified) {
    if (!cfg.p0) throw std::invalid_argument("modified big branch needs a root law");
    mod = std::make_unique<ModifiedGwSampler>(cfg.p, *cfg.p0);
  }
  std::vector<double> last;
  for (std::size_t n : ns) {
    auto deficit = run_reps<double>(reps, opt, 6, n, [&](RngStream& rng) -> double {
      switch (cfg.kind) {
        case BranchKind::forest: {
          std::vector<std::size_t> sizes;
          gw.forest_code(n, cfg.m, rng, &sizes);
          return static_cast<double>(n - *std::max_element(sizes.begin(), sizes.end()));
        }
        case BranchKind::modified: {
          const OrderedTree t = mod->sample(n, rng);
          std::size_t big = 0;
          for (Vertex c : t.children(0)) big = std::max(big, t.subtree_size(c));
          return static_cast<double>(n - big);
        }
        case BranchKind::edge_marked: {
          std::vector<std::size_t> sizes;
          gw.forest_code(n, 2, rng, &sizes);
          return static_cast<double>(std::min(sizes[0], sizes[1]));
        }
      }
      return 0.0;
    });
    res.rows.push_back({n, mean_of(deficit), quantile(deficit, 0.90), quantile(deficit, 0.99)});
    last = std::move(deficit);
  }
  const double q0 = res.rows.front().q99;
  res.ratio99 = q0 > 0.0 ? res.rows.back().q99 / q0 : (res.rows.back().q99 > 0.0 ? INFINITY : 1.0);

  if (cfg.kind == BranchKind::edge_marked) {
    // cells k = 1..K against a_k, everything larger in one tail cell
    const std::size_t K = std::min<std::size_t>(200, ns.back() / 2);
    const auto A = solve_A(cfg.p, K);
    std::vector<double> probs(K + 1, 0.0), observed(K + 1, 0.0);
    double head = 0.0;
    for (std::size_t k = 1; k <= K; ++k) {
      probs[k - 1] = A[k];
      head += A[k];
    }
    probs[K] = std::max(0.0, 1.0 - head);
    for (double d : last) observed[std::min<std::size_t>(static_cast<std::size_t>(d), K + 1) - 1] += 1.0;
    std::vector<double> pp, oo;
    for (std::size_t i = 0; i <= K; ++i)
      if (probs[i] > 0.0) {
        pp.push_back(probs[i]);
        oo.push_back(observed[i]);
      }
    res.small_side = chi_square_compare(pp, oo);
    res.has_small_side_test = true;
  }
  return res;
}

// ------------------------------------------------------------ moment bounds

MomentBoundsResult exp_moment_bounds(const TreeSource& src, const std::vector<int>& rs,
                                     const std::vector<std::size_t>& ns, std::size_t j_max, std::size_t reps,
                                     const RunOptions& opt) {
  if (ns.empty() || rs.empty() || j_max == 0) throw std::invalid_argument("moment bounds needs r, n and j grids");
  MomentBoundsResult res;
  // per n: (Lambda(i_j), L(i_j)) for each replication
  std::vector<std::vector<std::size_t>> is(ns.size());
  std::vector<std::vector<std::vector<double>>> lam(ns.size()), hgt(ns.size());
  for (std::size_t a = 0; a < ns.size(); ++a) {
    const std::size_t n = ns[a];
    for (std::size_t j = 1; j <= j_max; ++j)
      is[a].push_back(static_cast<std::size_t>(std::llround(static_cast<double>(j) * std::sqrt(static_cast<double>(n)))));
    auto per = run_reps<std::vector<double>>(reps, opt, 7, n, [&](RngStream& rng) {
      const OrderedTree t = src.draw(n, rng);
      auto d = distance_profile_fast(t, 1);
      auto h = height_profile(t);
      check_conservation(d, n);
      check_conservation(h, n);
      std::vector<double> v;
      for (auto i : is[a]) {
        v.push_back(i < d.counts.size() ? static_cast<double>(d.counts[i]) : 0.0);
        v.push_back(i < h.counts.size() ? static_cast<double>(h.counts[i]) : 0.0);
      }
      return v;
    });
    lam[a].assign(j_max, {});
    hgt[a].assign(j_max, {});
    for (const auto& v : per)
      for (std::size_t j = 0; j < j_max; ++j) {
        lam[a][j].push_back(v[2 * j]);
        hgt[a][j].push_back(v[2 * j + 1]);
      }
  }
  auto moment = [](const std::vector<double>& x, int r) {
    double s = 0.0;
    for (double v : x) s += std::pow(v, r);
    return s / static_cast<double>(x.size());
  };
  for (int r : rs) {
    // slope of log(moment / n^{3r/2}) against i^2/n on the smallest n; c is half its decay rate
    const double n0 = static_cast<double>(ns.front());
    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < j_max; ++j) {
      const double m = moment(lam[0][j], r);
      if (m <= 0.0) continue;
      const double i = static_cast<double>(is[0][j]);
      xs.push_back(i * i / n0);
      ys.push_back(std::log(m / std::pow(n0, 1.5 * r)));
    }
    double c = 0.0;
    if (xs.size() >= 2) {
      const double mx = mean_of(xs), my = mean_of(ys);
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
      }
      c = std::max(0.0, -0.5 * sxy / sxx);
    }
    res.c_hat.push_back(c);
    std::vector<double> sup_lin, sup_gauss;
    for (std::size_t a = 0; a < ns.size(); ++a) {
      const double n = static_cast<double>(ns[a]);
      double sl = 0.0, sg = 0.0;
      for (std::size_t j = 0; j < j_max; ++j) {
        MomentRow row;
        row.n = ns[a];
        row.r = r;
        row.j = j + 1;
        row.i = is[a][j];
        const double i = static_cast<double>(row.i);
        row.moment = moment(lam[a][j], r);
        row.height_moment = moment(hgt[a][j], r);
        row.ratio_linear = row.moment / std::pow(i * n, r);
        row.ratio_gauss = row.moment / (std::pow(n, 1.5 * r) * std::exp(-c * i * i / n));
        sl = std::max(sl, row.ratio_linear);
        sg = std::max(sg, row.ratio_gauss);
        res.rows.push_back(row);
      }
      sup_lin.push_back(sl);
      sup_gauss.push_back(sg);
    }
    auto spread = [](const std::vector<double>& v) {
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      return *lo > 0.0 ? *hi / *lo : INFINITY;
    };
    res.spread_linear.push_back(spread(sup_lin));
    res.spread_gauss.push_back(spread(sup_gauss));
    res.sup_linear.push_back(std::move(sup_lin));
    res.sup_gauss.push_back(std::move(sup_gauss));
  }
  return res;
}

// ------------------------------------------------------------------ fourier

FourierExactResult exp_fourier_exact(const OffspringDistribution& p, const std::vector<std::size_t>& ns,
                                     const std::vector<double>& xis, const RunOptions& opt) {
  if (ns.empty() || xis.empty()) throw std::invalid_argument("fourier needs n and xi grids");
  FourierExactResult res;
  res.rows.resize(ns.size() * xis.size());
  const int threads = opt.jobs > 0 ? opt.jobs : omp_get_max_threads();
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long idx = 0; idx < static_cast<long>(res.rows.size()); ++idx) {
    try {
      const std::size_t n = ns[static_cast<std::size_t>(idx) / xis.size()];
      const double xi = xis[static_cast<std::size_t>(idx) % xis.size()];
      const double nd = static_cast<double>(n);
      const double t = xi / std::sqrt(nd);
      const auto m = fourier_second_moments(p, n, t);
      const double f = interpolation_factor(t);
      res.rows[static_cast<std::size_t>(idx)] = {n, xi, m.height * f * f / (nd * nd), m.distance * f * f / (nd * nd * nd * nd)};
    } catch (...) {
#pragma omp critical(treeprofile_rep_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  for (const auto& row : res.rows) {
    const double sh = std::min(1.0, std::pow(row.xi, -2.0));
    const double sd = std::min(1.0, std::pow(row.xi, -4.0));
    if (row.n == ns.front()) {
      res.c_height = std::max(res.c_height, row.height / sh);
      res.c_distance = std::max(res.c_distance, row.distance / sd);
    }
    res.sup_height = std::max(res.sup_height, row.height / sh);
    res.sup_distance = std::max(res.sup_distance, row.distance / sd);
  }
  return res;
}

FourierMcResult exp_fourier_montecarlo(const OffspringDistribution& p, std::size_t n, double xi, std::size_t reps,
                                       const RunOptions& opt) {
  GwSampler gw(p);
  const double nd = static_cast<double>(n);
  const double t = xi / std::sqrt(nd);
  auto transform = [t](const std::vector<std::int64_t>& c) {
    std::complex<double> s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += static_cast<double>(c[k]) * std::polar(1.0, t * static_cast<double>(k));
    return std::norm(s);
  };
  auto per = run_reps<std::vector<double>>(reps, opt, 8, n, [&](RngStream& rng) {
    const OrderedTree tr = gw.conditioned(n, rng);
    auto d = distance_profile_fast(tr, 1);
    auto h = height_profile(tr);
    check_conservation(d, n);
    return std::vector<double>{transform(d.counts) / (nd * nd * nd * nd), transform(h.counts) / (nd * nd)};
  });
  const auto exact = fourier_second_moments(p, n, t);
  return {n, xi, estimate_mean(column(per, 0), opt.seed), estimate_mean(column(per, 1), opt.seed),
          exact.distance / (nd * nd * nd * nd), exact.height / (nd * nd)};
}

std::vector<FourierScaledRow> exp_fourier_scaled(const OffspringDistribution& p, std::size_t n,
                                                 const std::vector<double>& xis, const RunOptions& opt) {
  const auto ex = exp_fourier_exact(p, {n}, xis, opt);
  std::vector<FourierScaledRow> out;
  for (const auto& row : ex.rows) {
    const double eta = 2.0 * row.xi / p.sigma();
    out.push_back({row.xi, eta, std::pow(eta, 4) * row.distance});
  }
  return out;
}

// ------------------------------------------------------------------- holder

double holder_norm_squared(const DistanceProfileCounts& dp, std::size_t n, double alpha) {
  const double nd = static_cast<double>(n);
  const double scale = std::pow(nd, -1.5);
  const double step = 1.0 / std::sqrt(nd);
  // f at k = -1 .. D+1; the two ends are zero
  std::vector<double> f(dp.counts.size() + 2, 0.0);
  for (std::size_t k = 0; k < dp.counts.size(); ++k) f[k + 1] = scale * static_cast<double>(dp.counts[k]);
  double sup = 0.0;
  for (double v : f) sup = std::max(sup, std::abs(v));
  std::vector<double> denom(f.size());
  for (std::size_t h = 1; h < f.size(); ++h) denom[h] = 1.0 / std::pow(static_cast<double>(h) * step, alpha);
  double semi = 0.0;
  for (std::size_t a = 0; a < f.size(); ++a)
    for (std::size_t b = a + 1; b < f.size(); ++b) semi = std::max(semi, std::abs(f[b] - f[a]) * denom[b - a]);
  return (sup + semi) * (sup + semi);
}

double lipschitz_statistic(const DistanceProfileCounts& dp, std::size_t n) {
  std::int64_t best = 0, prev = 0;
  for (auto c : dp.counts) {
    best = std::max(best, std::abs(c - prev));
    prev = c;
  }
  best = std::max(best, std::abs(prev));
  return static_cast<double>(best) / static_cast<double>(n);
}

HolderResult exp_holder_statistic(const TreeSource& src, double alpha, const std::vector<std::size_t>& ns,
                                  std::size_t reps, const RunOptions& opt) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (ns.empty()) throw std::invalid_argument("holder statistic needs an n grid");
  HolderResult res;
  res.alpha = alpha;
  std::vector<double> first, last;
  for (std::size_t n : ns) {
    auto per = run_reps<std::vector<double>>(reps, opt, 9, n, [&](RngStream& rng) {
      auto d = distance_profile_fast(src.draw(n, rng), 1);
      check_conservation(d, n);
      return std::vector<double>{holder_norm_squared(d, n, alpha), lipschitz_statistic(d, n)};
    });
    auto norms = column(per, 0);
    res.rows.push_back({n, estimate_mean(norms, opt.seed), estimate_mean(column(per, 1), opt.seed)});
    if (first.empty()) first = norms;
    last = std::move(norms);
  }
  RngStream boot(opt.seed, stream_id(10, 0, 0));
  res.ratio = bootstrap_ratio_of_means(last, first, 1000, boot);
  return res;
}

// ---------------------------------------------------------------- leaf bias

std::string unlabelled_key(const Adjacency& g) {
  const std::size_t n = g.size();
  if (n <= 2) return n == 1 ? "()" : "(())";
  // peel leaves down to the one or two centers
  std::vector<std::size_t> deg(n);
  std::vector<Vertex> layer;
  for (Vertex v = 0; v < n; ++v) {
    deg[v] = g.degree(v);
    if (deg[v] <= 1) layer.push_back(v);
  }
  std::size_t left = n;
  while (left > 2) {
    left -= layer.size();
    std::vector<Vertex> next;
    for (Vertex v : layer)
      for (Vertex u : g.neighbors(v))
        if (--deg[u] == 1) next.push_back(u);
    layer = std::move(next);
  }
  std::string best;
  for (Vertex c : layer) {
    auto s = shape_code(g, c, kNoVertex);
    if (best.empty() || s < best) best = s;
  }
  return best;
}

std::vector<LeafBiasRow> exp_leafbias_proximity(const WeightSequence& w, const std::vector<std::size_t>& ns,
                                                std::size_t reps, const RunOptions& opt) {
  UnrootedSampler leaf(w, Marking::leaf), edge(w, Marking::edge);
  std::vector<LeafBiasRow> out;
  for (std::size_t n : ns) {
    const double sn = std::sqrt(static_cast<double>(n));
    struct Obs {
      double diam = 0, wiener = 0, width = 0;
      std::string key;
    };
    auto observe = [&](const UnrootedSampler& s, RngStream& rng) {
      const OrderedTree t = s.sample_shape(n, rng);
      const Adjacency g = t.adjacency();
      Obs o;
      o.diam = static_cast<double>(diameter(g)) / sn;
      o.wiener = static_cast<double>(wiener_index_direct(g)) * std::pow(static_cast<double>(n), -2.5);
      o.width = static_cast<double>(max_count(height_profile(g, static_cast<Vertex>(rng.index(n))).counts)) / sn;
      if (n <= 6) o.key = unlabelled_key(g);
      return o;
    };
    auto a = run_reps<Obs>(reps, opt, 11, n, [&](RngStream& rng) { return observe(leaf, rng); });
    auto b = run_reps<Obs>(reps, opt, 12, n, [&](RngStream& rng) { return observe(edge, rng); });
    auto field = [](const std::vector<Obs>& v, double Obs::*m) {
      std::vector<double> x;
      for (const auto& o : v) x.push_back(o.*m);
      return x;
    };
    LeafBiasRow row;
    row.n = n;
    const std::size_t bins = 20;
    row.tv_diameter = binned_total_variation(field(a, &Obs::diam), field(b, &Obs::diam), bins);
    row.tv_wiener = binned_total_variation(field(a, &Obs::wiener), field(b, &Obs::wiener), bins);
    row.tv_width = binned_total_variation(field(a, &Obs::width), field(b, &Obs::width), bins);
    if (n >= 2 && n <= 6) {
      row.exact_tv = total_variation(exact_leafbiased_law(w, n), exact_labelled_law(w, n));
      std::map<std::string, double> diff;
      for (const auto& o : a) diff[o.key] += 1.0 / static_cast<double>(reps);
      for (const auto& o : b) diff[o.key] -= 1.0 / static_cast<double>(reps);
      double tv = 0.0;
      for (const auto& [k, d] : diff) tv += std::abs(d);
      row.tv_shape = 0.5 * tv;
    }
    out.push_back(row);
  }
  return out;
}

// ------------------------------------------------------------- named runner

std::string to_csv(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t j = 0; j < columns.size(); ++j) s += (j ? "," : "") + columns[j];
  s += '\n';
  char buf[64];
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.12g", r[j]);
      if (j) s += ',';
      s += buf;
    }
    s += '\n';
  }
  return s;
}

std::vector<std::string> experiment_names() {
  return {"profile_mean", "distance_profile_mean", "width", "wiener", "root_degree", "big_branch",
          "moment_bounds", "fourier_exact", "fourier_montecarlo", "fourier_scaled", "holder", "leafbias"};
}

namespace {

void require_keys(const json& cfg, std::initializer_list<const char*> allowed) {
  if (!cfg.is_object()) throw std::invalid_argument("experiment configuration must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : cfg.items())
    if (!ok.count(k)) throw std::invalid_argument("unknown configuration field '" + k + "'");
}

OffspringDistribution rooted_law(const json& spec) {
  auto ws = WeightSequence::from_json(spec);
  if (ws.kind() != WeightKind::rooted_phi) throw std::invalid_argument("expected rooted weights");
  return criticalize(ws).distribution;
}

TreeSource source_from(const json& cfg) {
  const auto kind = parse_sampler_kind(cfg.value("sampler", std::string("rooted")));
  if (!cfg.contains("weights")) throw std::invalid_argument("configuration needs 'weights'");
  switch (kind) {
    case SamplerKind::rooted: return rooted_source(rooted_law(cfg.at("weights")));
    case SamplerKind::modified: {
      if (!cfg.contains("root_weights")) throw std::invalid_argument("modified sampler needs 'root_weights'");
      return modified_source(rooted_law(cfg.at("weights")),
                             OffspringDistribution(WeightSequence::from_json(cfg.at("root_weights"))));
    }
    default: {
      auto w = WeightSequence::from_json(cfg.at("weights"));
      if (w.kind() != WeightKind::unrooted_w) throw std::invalid_argument("unrooted sampler needs unrooted weights");
      const Marking m = kind == SamplerKind::unrooted_vertex ? Marking::vertex
                        : kind == SamplerKind::unrooted_edge ? Marking::edge
                                                             : Marking::leaf;
      return unrooted_source(w, m);
    }
  }
}

std::vector<std::size_t> sizes_from(const json& cfg, std::vector<std::size_t> fallback) {
  if (cfg.contains("ns")) return cfg.at("ns").get<std::vector<std::size_t>>();
  if (cfg.contains("n")) return {cfg.at("n").get<std::size_t>()};
  return fallback;
}

json estimate_json(const EstimateWithError& e) {
  return {{"value", e.value}, {"stderr", e.std_error}, {"reps", e.reps}, {"seed", e.seed}};
}

ExperimentOutput curve_output(const BinnedCurve& c) {
  ExperimentOutput o;
  o.columns = {"lo", "hi", "mean", "stderr", "z"};
  o.reference_columns = {"lo", "hi", "reference"};
  for (std::size_t b = 0; b < c.mean.size(); ++b) {
    const double z = c.std_error[b] > 0.0 ? (c.mean[b] - c.reference[b]) / c.std_error[b] : 0.0;
    o.rows.push_back({c.lo[b], c.hi[b], c.mean[b], c.std_error[b], z});
    o.reference_rows.push_back({c.lo[b], c.hi[b], c.reference[b]});
  }
  const auto g = gate_curve(c);
  o.summary = {{"n", c.n},           {"reps", c.reps},           {"sigma", c.sigma},
               {"bin_width", c.bin_width}, {"gate_pass", g.pass}, {"bins_checked", g.bins_checked},
               {"gate_failures", g.failures}, {"worst_excess", g.worst_excess}};
  return o;
}

}  // namespace

ExperimentOutput run_experiment(const std::string& name, const json& cfg, const RunOptions& opt) {
  const std::size_t reps = cfg.value("reps", std::size_t{1000});
  ExperimentOutput o;
  if (name == "profile_mean" || name == "distance_profile_mean") {
    require_keys(cfg, {"weights", "root_weights", "sampler", "n", "reps", "bin_width"});
    const auto src = source_from(cfg);
    const std::size_t n = cfg.value("n", std::size_t{10000});
    const double bw = cfg.value("bin_width", 0.1);
    return curve_output(name == "profile_mean" ? exp_profile_mean(src, n, reps, bw, opt)
                                               : exp_distance_profile_mean(src, n, reps, bw, opt));
  }
  if (name == "width" || name == "wiener") {
    require_keys(cfg, {"weights", "root_weights", "sampler", "n", "ns", "reps"});
    const auto src = source_from(cfg);
    o.reference_columns = {"reference"};
    if (name == "width") {
      o.columns = {"n", "mean_scaled", "mean_stderr", "second_scaled", "second_stderr"};
      double lo = INFINITY, hi = 0.0;
      for (auto n : sizes_from(cfg, {1000, 10000, 100000})) {
        auto r = exp_width(src, n, reps, opt);
        o.rows.push_back({double(n), r.mean_scaled.value, r.mean_scaled.std_error, r.second_scaled.value,
                          r.second_scaled.std_error});
        lo = std::min(lo, r.second_scaled.value);
        hi = std::max(hi, r.second_scaled.value);
      }
      o.reference_rows = {{reference_width_mean(src.sigma)}};
      o.summary = {{"reference", reference_width_mean(src.sigma)}, {"second_moment_spread", hi / lo}};
    } else {
      o.columns = {"n", "scaled", "stderr"};
      for (auto n : sizes_from(cfg, {100000})) {
        auto r = exp_wiener(src, n, reps, opt);
        o.rows.push_back({double(n), r.scaled.value, r.scaled.std_error});
      }
      o.reference_rows = {{reference_wiener(src.sigma)}};
      o.summary = {{"reference", reference_wiener(src.sigma)}};
    }
    return o;
  }
  if (name == "root_degree") {
    require_keys(cfg, {"weights", "root_weights", "n", "reps"});
    if (!cfg.contains("weights") || !cfg.contains("root_weights"))
      throw std::invalid_argument("root_degree needs 'weights' and 'root_weights'");
    const auto r = exp_root_degree(rooted_law(cfg.at("weights")),
                                   OffspringDistribution(WeightSequence::from_json(cfg.at("root_weights"))),
                                   cfg.value("n", std::size_t{10000}), reps, opt);
    o.columns = {"k", "count", "empirical"};
    o.reference_columns = {"k", "limit"};
    for (std::size_t k = 0; k < r.counts.size(); ++k) {
      o.rows.push_back({double(k), double(r.counts[k]), r.empirical[k]});
      o.reference_rows.push_back({double(k), r.limit[k]});
    }
    o.summary = {{"chi2", r.chi.statistic}, {"p_value", r.chi.p_value}, {"dof", r.chi.dof},
                 {"dominated", r.dominated}, {"max_ratio", r.max_ratio}};
    return o;
  }
  if (name == "big_branch") {
    require_keys(cfg, {"weights", "root_weights", "kind", "m", "ns", "n", "reps"});
    const auto kind = parse_branch_kind(cfg.value("kind", std::string("forest")));
    BigBranchConfig bc{kind, OffspringDistribution(WeightSequence::geometric(0.5)), nullptr, cfg.value("m", std::size_t{3})};
    if (kind == BranchKind::edge_marked) {
      auto w = WeightSequence::from_json(cfg.at("weights"));
      bc.p = w.kind() == WeightKind::unrooted_w ? critical_unrooted_laws(w).p : criticalize(w).distribution;
    } else {
      bc.p = rooted_law(cfg.at("weights"));
    }
    if (kind == BranchKind::modified) {
      if (!cfg.contains("root_weights")) throw std::invalid_argument("modified big branch needs 'root_weights'");
      bc.p0 = std::make_unique<OffspringDistribution>(WeightSequence::from_json(cfg.at("root_weights")));
    }
    const auto r = exp_big_branch(bc, sizes_from(cfg, {1000, 10000}), reps, opt);
    o.columns = {"n", "mean", "q90", "q99"};
    for (const auto& row : r.rows) o.rows.push_back({double(row.n), row.mean, row.q90, row.q99});
    o.summary = {{"kind", to_string(kind)}, {"ratio99", r.ratio99}};
    if (r.has_small_side_test) {
      o.summary["small_side_chi2"] = r.small_side.statistic;
      o.summary["small_side_p_value"] = r.small_side.p_value;
      const auto A = solve_A(bc.p, 50);
      o.reference_columns = {"k", "a_k"};
      for (std::size_t k = 1; k <= 50; ++k) o.reference_rows.push_back({double(k), A[k]});
    }
    return o;
  }
  if (name == "moment_bounds") {
    require_keys(cfg, {"weights", "root_weights", "sampler", "rs", "ns", "n", "j_max", "reps"});
    const auto src = source_from(cfg);
    const auto rs = cfg.value("rs", std::vector<int>{1, 2});
    const auto r = exp_moment_bounds(src, rs, sizes_from(cfg, {256, 1024, 4096}), cfg.value("j_max", std::size_t{8}),
                                     reps, opt);
    o.columns = {"n", "r", "j", "i", "moment", "height_moment", "ratio_linear", "ratio_gauss"};
    for (const auto& m : r.rows)
      o.rows.push_back({double(m.n), double(m.r), double(m.j), double(m.i), m.moment, m.height_moment, m.ratio_linear,
                        m.ratio_gauss});
    o.summary = {{"c_hat", r.c_hat}, {"sup_linear", r.sup_linear}, {"sup_gauss", r.sup_gauss},
                 {"spread_linear", r.spread_linear}, {"spread_gauss", r.spread_gauss}};
    return o;
  }
  if (name == "fourier_exact" || name == "fourier_scaled") {
    require_keys(cfg, {"weights", "ns", "n", "xis"});
    const auto p = rooted_law(cfg.at("weights"));
    const auto xis = cfg.value("xis", std::vector<double>{0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5, 5.5, 6, 6.5, 7, 7.5, 8});
    if (name == "fourier_exact") {
      const auto r = exp_fourier_exact(p, sizes_from(cfg, {64, 128, 256, 512, 1024}), xis, opt);
      o.columns = {"n", "xi", "height", "distance"};
      for (const auto& row : r.rows) o.rows.push_back({double(row.n), row.xi, row.height, row.distance});
      o.summary = {{"c_height", r.c_height}, {"c_distance", r.c_distance}, {"sup_height", r.sup_height},
                   {"sup_distance", r.sup_distance}};
    } else {
      const auto rows = exp_fourier_scaled(p, sizes_from(cfg, {2048}).front(), xis, opt);
      o.columns = {"xi", "eta", "scaled"};
      o.reference_columns = {"eta", "reference"};
      for (const auto& row : rows) {
        o.rows.push_back({row.xi, row.eta, row.scaled});
        o.reference_rows.push_back({row.eta, 48.0});
      }
      o.summary = json::object();
    }
    return o;
  }
  if (name == "fourier_montecarlo") {
    require_keys(cfg, {"weights", "n", "xi", "reps"});
    const auto r = exp_fourier_montecarlo(rooted_law(cfg.at("weights")), cfg.value("n", std::size_t{512}),
                                          cfg.value("xi", 2.0), reps, opt);
    o.columns = {"n", "xi", "distance", "distance_stderr", "height", "height_stderr"};
    o.rows.push_back({double(r.n), r.xi, r.distance.value, r.distance.std_error, r.height.value, r.height.std_error});
    o.reference_columns = {"n", "xi", "exact_distance", "exact_height"};
    o.reference_rows.push_back({double(r.n), r.xi, r.exact_distance, r.exact_height});
    o.summary = {{"distance", estimate_json(r.distance)}, {"exact_distance", r.exact_distance}};
    return o;
  }
  if (name == "holder") {
    require_keys(cfg, {"weights", "root_weights", "sampler", "alpha", "ns", "n", "reps"});
    const auto r = exp_holder_statistic(source_from(cfg), cfg.value("alpha", 0.9), sizes_from(cfg, {1000, 10000, 100000}),
                                        reps, opt);
    o.columns = {"n", "norm_squared", "norm_stderr", "lipschitz", "lipschitz_stderr"};
    for (const auto& row : r.rows)
      o.rows.push_back({double(row.n), row.norm_squared.value, row.norm_squared.std_error, row.lipschitz.value,
                        row.lipschitz.std_error});
    o.summary = {{"alpha", r.alpha}, {"ratio", estimate_json(r.ratio)}};
    return o;
  }
  if (name == "leafbias") {
    require_keys(cfg, {"weights", "ns", "n", "reps"});
    const auto rows = exp_leafbias_proximity(WeightSequence::from_json(cfg.at("weights")),
                                             sizes_from(cfg, {1000, 10000, 100000}), reps, opt);
    o.columns = {"n", "tv_diameter", "tv_wiener", "tv_width", "exact_tv", "tv_shape"};
    for (const auto& r : rows)
      o.rows.push_back({double(r.n), r.tv_diameter, r.tv_wiener, r.tv_width, r.exact_tv, r.tv_shape});
    o.summary = json::object();
    return o;
  }
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

}  // namespace treeprofile
