#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "treeprofile/oracle.hpp"
#include "treeprofile/rng.hpp"
#include "treeprofile/sampler.hpp"
#include "treeprofile/stats.hpp"
#include "treeprofile/tree.hpp"
#include "treeprofile/weights.hpp"

namespace treeprofile {

// ------------------------------------------------------------------ references

/// Mean local time of the standard excursion at level u: 4u e^{-2u^2}.
double reference_local_time_mean(double u);
/// Limit of n^{-1/2} E L_n(x n^{1/2}): (sigma/2) 4u e^{-2u^2} with u = sigma x / 2.
double reference_profile_density(double sigma, double x);
/// Average of reference_profile_density over [lo, hi].
double reference_profile_bin(double sigma, double lo, double hi);
/// sigma sqrt(pi/2)
double reference_width_mean(double sigma);
/// (1/sigma) (1/2) sqrt(pi/2)
double reference_wiener(double sigma);
/// 48 eta^{-4}
double reference_fourier_tail(double eta);
/// Fourier transform of the triangular kernel: sin^2(t/2) / (t/2)^2.
double interpolation_factor(double t);

// --------------------------------------------------------------- tree sources

enum class SamplerKind { rooted, modified, unrooted_vertex, unrooted_edge, unrooted_leaf };
SamplerKind parse_sampler_kind(const std::string& name);
std::string to_string(SamplerKind kind);

/// A size-n random tree generator with the scaling constant sigma of its
/// branching law.
struct TreeSource {
  std::string name;
  double sigma = 1.0;
  std::function<OrderedTree(std::size_t, RngStream&)> draw;
};
TreeSource rooted_source(const OffspringDistribution& p);
TreeSource modified_source(const OffspringDistribution& p, const OffspringDistribution& p0);
TreeSource unrooted_source(const WeightSequence& w, Marking marking);

struct RunOptions {
  std::uint64_t seed = 1;
  int jobs = 0;  // 0: OpenMP default
};

// ----------------------------------------------------------------- results

struct BinnedCurve {
  std::size_t n = 0;
  double bin_width = 0.1;
  double sigma = 1.0;
  std::vector<double> lo, hi, mean, std_error, reference;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

struct CurveGate {
  bool pass = true;
  std::size_t bins_checked = 0;
  std::size_t failures = 0;
  std::size_t worst_bin = 0;
  double worst_excess = 0.0;  // |mean - ref| / allowed, worst over checked bins
};
/// Every bin with reference >= min_reference must satisfy
/// |mean - ref| <= max(k_sigma * stderr, rel * ref).
CurveGate gate_curve(const BinnedCurve& c, double min_reference = 0.05, double k_sigma = 4.0, double rel = 0.05);

BinnedCurve exp_profile_mean(const TreeSource& src, std::size_t n, std::size_t reps, double bin_width,
                             const RunOptions& opt);
BinnedCurve exp_distance_profile_mean(const TreeSource& src, std::size_t n, std::size_t reps, double bin_width,
                                      const RunOptions& opt);

struct WidthResult {
  std::size_t n = 0;
  EstimateWithError mean_scaled;    // n^{-1/2} W
  EstimateWithError second_scaled;  // n^{-1} W^2
  double reference = 0.0;
};
WidthResult exp_width(const TreeSource& src, std::size_t n, std::size_t reps, const RunOptions& opt);

struct WienerResult {
  std::size_t n = 0;
  EstimateWithError scaled;  // n^{-5/2} Wiener
  double reference = 0.0;
};
WienerResult exp_wiener(const TreeSource& src, std::size_t n, std::size_t reps, const RunOptions& opt);

struct RootDegreeResult {
  std::size_t n = 0;
  std::vector<double> limit;        // k p0_k / mu(p0)
  std::vector<double> empirical;    // frequencies
  std::vector<std::size_t> counts;
  ChiSquareResult chi{};
  bool dominated = true;            // empirical <= 2.5 limit on cells expecting >= 5
  double max_ratio = 0.0;
};
RootDegreeResult exp_root_degree(const OffspringDistribution& p, const OffspringDistribution& p0, std::size_t n,
                                 std::size_t reps, const RunOptions& opt);

enum class BranchKind { forest, modified, edge_marked };
BranchKind parse_branch_kind(const std::string& name);
std::string to_string(BranchKind kind);

struct BigBranchRow {
  std::size_t n = 0;
  double mean = 0.0;
  double q90 = 0.0;
  double q99 = 0.0;
};
struct BigBranchResult {
  BranchKind kind{};
  std::vector<BigBranchRow> rows;
  double ratio99 = 0.0;  // q99 at the largest n / q99 at the smallest n
  bool has_small_side_test = false;
  ChiSquareResult small_side{};  // edge-marked: smaller side vs a_k, at the largest n
};
struct BigBranchConfig {
  BranchKind kind = BranchKind::forest;
  OffspringDistribution p;
  std::unique_ptr<OffspringDistribution> p0;  // modified
  std::size_t m = 3;                          // forest
};
BigBranchResult exp_big_branch(const BigBranchConfig& cfg, const std::vector<std::size_t>& ns, std::size_t reps,
                               const RunOptions& opt);

struct MomentRow {
  std::size_t n = 0;
  int r = 1;
  std::size_t j = 0;  // i = round(j sqrt n)
  std::size_t i = 0;
  double moment = 0.0;         // E Lambda_n(i)^r
  double height_moment = 0.0;  // E L_n(i)^r
  double ratio_linear = 0.0;   // moment / (i^r n^r)
  double ratio_gauss = 0.0;    // moment / (n^{3r/2} e^{-c i^2/n})
};
struct MomentBoundsResult {
  std::vector<MomentRow> rows;
  std::vector<double> c_hat;  // per r, fitted on the smallest n
  std::vector<std::vector<double>> sup_linear;  // [r index][n index]
  std::vector<std::vector<double>> sup_gauss;
  std::vector<double> spread_linear;  // max/min across n, per r
  std::vector<double> spread_gauss;
};
MomentBoundsResult exp_moment_bounds(const TreeSource& src, const std::vector<int>& rs,
                                     const std::vector<std::size_t>& ns, std::size_t j_max, std::size_t reps,
                                     const RunOptions& opt);

struct FourierRow {
  std::size_t n = 0;
  double xi = 0.0;
  double height = 0.0;    // E|L^_n(xi n^{-1/2})|^2 / n^2
  double distance = 0.0;  // E|Lambda^_n(xi n^{-1/2})|^2 / n^4
};
struct FourierExactResult {
  std::vector<FourierRow> rows;
  double c_height = 0.0;    // fitted on the smallest n
  double c_distance = 0.0;
  double sup_height = 0.0;  // sup over all rows of value / shape
  double sup_distance = 0.0;
};
/// Exact second moments with the interpolation factor applied; shapes
/// min(xi^-2, 1) and min(xi^-4, 1).
FourierExactResult exp_fourier_exact(const OffspringDistribution& p, const std::vector<std::size_t>& ns,
                                     const std::vector<double>& xis, const RunOptions& opt);
struct FourierMcResult {
  std::size_t n = 0;
  double xi = 0.0;
  EstimateWithError distance;  // E|Lambda^°_n(xi n^{-1/2})|^2 / n^4
  EstimateWithError height;    // E|L^°_n(xi n^{-1/2})|^2 / n^2
  double exact_distance = 0.0;
  double exact_height = 0.0;
};
FourierMcResult exp_fourier_montecarlo(const OffspringDistribution& p, std::size_t n, double xi, std::size_t reps,
                                       const RunOptions& opt);
struct FourierScaledRow {
  double xi = 0.0;
  double eta = 0.0;     // 2 xi / sigma
  double scaled = 0.0;  // eta^4 E|Lambda^_n|^2 / n^4
};
std::vector<FourierScaledRow> exp_fourier_scaled(const OffspringDistribution& p, std::size_t n,
                                                 const std::vector<double>& xis, const RunOptions& opt);

/// (sup|f| + discrete alpha-seminorm)^2 for f(x) = n^{-3/2} Lambda(x n^{1/2}) on
/// the grid k n^{-1/2}, k = -1 .. D+1.
double holder_norm_squared(const DistanceProfileCounts& dp, std::size_t n, double alpha);
/// n^{-1} max_k |Lambda(k+1) - Lambda(k)|
double lipschitz_statistic(const DistanceProfileCounts& dp, std::size_t n);

struct HolderRow {
  std::size_t n = 0;
  EstimateWithError norm_squared;
  EstimateWithError lipschitz;
};
struct HolderResult {
  double alpha = 0.9;
  std::vector<HolderRow> rows;
  EstimateWithError ratio;  // largest-n mean / smallest-n mean, bootstrap error
};
HolderResult exp_holder_statistic(const TreeSource& src, double alpha, const std::vector<std::size_t>& ns,
                                  std::size_t reps, const RunOptions& opt);

struct LeafBiasRow {
  std::size_t n = 0;
  double tv_diameter = 0.0;
  double tv_wiener = 0.0;
  double tv_width = 0.0;
  double exact_tv = -1.0;  // oracle total variation for n <= 6, else -1
  double tv_shape = -1.0;  // empirical total variation over unlabelled shapes, n <= 6
};
/// Canonical string of the unlabelled tree (rooted at its center).
std::string unlabelled_key(const Adjacency& g);
std::vector<LeafBiasRow> exp_leafbias_proximity(const WeightSequence& w, const std::vector<std::size_t>& ns,
                                                std::size_t reps, const RunOptions& opt);

// ------------------------------------------------------------- named runner

/// Tabular output: results.csv and reference.csv contents plus a JSON summary.
struct ExperimentOutput {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> reference_columns;
  std::vector<std::vector<double>> reference_rows;
  nlohmann::json summary;
};
/// Runs the experiment `name` from a JSON configuration (unknown fields rejected).
ExperimentOutput run_experiment(const std::string& name, const nlohmann::json& config, const RunOptions& opt);
std::vector<std::string> experiment_names();

std::string to_csv(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows);

}  // namespace treeprofile
