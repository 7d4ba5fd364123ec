// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "protect/cli.hpp"
#include "protect/protect.hpp"
#include "support.hpp"

using namespace protect;
using namespace protect::testing;
using Sym = SymmetricMatrix<double>;
using Pair = PerturbationPair<double>;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) detail = why;
    pass = pass && ok;
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

int failures = 0;

void report(int id, const char* title, const Verdict& v, const std::string& summary) {
  std::printf("[%s] C%d %s: %s\n", v.pass ? "PASS" : "FAIL", id, title, v.pass ? summary.c_str() : v.detail.c_str());
  if (!v.pass) ++failures;
}

// C1
void example_golden() {
  Verdict v;
  const Pair pair(example_a(), example_b());
  const auto rep = protected_set(pair);
  v.require(rep.protected_points.size() == 1, "protected set is not a single point");
  double worst_point = 0;
  if (rep.protected_points.size() == 1) {
    worst_point = std::abs(rep.protected_points[0].lambda);
    v.require(worst_point <= 1e-12, "protected point differs from 0: " + fmt("%.3e", worst_point));
    v.require(rep.protected_points[0].residual <= 1e-12, "residual " + fmt("%.3e", rep.protected_points[0].residual));
  }
  double spec_err = 0, dist_err = 0;
  for (double t : {0.0, 1.0, -1.0, 2.0, -2.0, 10.0, -10.0}) {
    const auto d = eigh(example_a() + t * example_b());
    spec_err = std::max({spec_err, std::abs(d.eigenvalues[0] - example_lower(t)),
                         std::abs(d.eigenvalues[1] - example_upper(t))});
    dist_err = std::max(dist_err, std::abs(dist_to_spectrum(d, 0.0) - example_dist(t)));
  }
  v.require(spec_err <= 1e-10, "spectrum error " + fmt("%.3e", spec_err));
  v.require(dist_err <= 1e-10, "distance error " + fmt("%.3e", dist_err));
  report(1, "2x2 golden values", v,
         "protected set {0}, spectrum err " + fmt("%.1e", spec_err) + ", dist err " + fmt("%.1e", dist_err));
}

// C2
void distance_sandwich() {
  Verdict v;
  const Pair pair(example_a(), example_b());
  double ratio = 0;
  for (double at : {2.0, 10.0, 1e3, 1e6})
    for (double t : {at, -at}) {
      const auto b = distance_bounds(pair, t);
      v.require(std::abs(b.nu - 1) <= 1e-12 && std::abs(b.eta - 1) <= 1e-12, "nu or eta differ from 1");
      const double lower = 1 / (at + 1), upper = 1 / (at - 1);
      v.require(lower <= b.actual && b.actual <= upper,
                "sandwich violated at t=" + fmt("%g", t) + ": dist " + fmt("%.17g", b.actual));
      v.require(std::abs(b.actual - example_dist(t)) <= 1e-12 * example_dist(t), "dist disagrees with closed form");
      if (at == 1e6) ratio = std::max(ratio, std::abs(b.actual * at - 1));
    }
  v.require(ratio <= 5e-3, "actual*|t| off by " + fmt("%.3e", ratio));
  report(2, "distance sandwich", v, "holds for |t| in {2,10,1e3,1e6}, |actual*|t| - 1| = " + fmt("%.1e", ratio) + " at 1e6");
}

// C3
void equivalence_randomized() {
  Verdict v;
  std::mt19937_64 rng(20240301);
  const std::vector<double> ts{-1e3, -10, -1, 1, 10, 1e3};
  const std::vector<std::pair<double, double>> zw{{1, 2}, {-1, 3}, {0.5, -2}, {10, -7}};
  int agree = 0;
  for (int i = 0; i < 200; ++i) {
    const bool want = i < 100;
    const Instance inst = want ? protected_instance(rng) : unprotected_instance(rng);
    const Pair pair(inst.a, inst.b);
    const bool residual = is_protected(pair, inst.lambda).is_protected;
    const auto idx = nilpotency_index(pair, inst.lambda);
    const bool nil = idx && *idx <= 2;
    double pr = 0;
    for (auto [z, w] : zw) pr = std::max(pr, pseudo_resolvent_defect(pair, inst.lambda, z, w));
    bool inv = true;
    for (double t : ts) inv = inv && shifted_inverse_formula(pair, inst.lambda, t).defect <= 1e-8 * (1 + std::abs(t));
    const bool unanimous = residual == want && nil == want && (pr <= 1e-8) == want && inv == want;
    if (unanimous) ++agree;
    v.require(unanimous, "instance " + std::to_string(i) + " disagrees (residual " + std::to_string(residual) +
                             ", nilpotent " + std::to_string(nil) + ", pseudo-resolvent " + fmt("%.2e", pr) +
                             ", inverse " + std::to_string(inv) + ")");
  }
  report(3, "criterion equivalence (200 instances)", v, std::to_string(agree) + "/200 unanimous");
}

std::vector<RealizedPair<double>> random_sets(std::mt19937_64& rng, int count) {
  std::uniform_int_distribution<std::size_t> size(1, 10);
  std::uniform_real_distribution<double> w(0.2, 3.0);
  std::vector<RealizedPair<double>> out;
  for (int i = 0; i < count; ++i) {
    const std::size_t m = size(rng);
    const auto p = random_separated(rng, m, -10.0, 10.0, 1e-3);
    std::vector<double> weights(m);
    for (double& x : weights) x = w(rng);
    out.push_back(realize<double>(p, std::span<const double>(weights)));
  }
  return out;
}

// C4
void realization_round_trip(const std::vector<RealizedPair<double>>& sets) {
  Verdict v;
  const auto grid = standard_t_grid();
  std::size_t total = 0, hit = 0, crossed = 0;
  double closest = 1e300;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const auto& r = sets[s];
    const Pair pair(r.a, r.b);
    const auto rep = protected_set(pair);
    bool same = rep.protected_points.size() == r.points.size();
    for (std::size_t k = 0; same && k < r.points.size(); ++k)
      same = std::abs(rep.protected_points[k].lambda - r.points[k]) <= 1e-9 * pair.scale();
    v.require(same, "set " + std::to_string(s) + " not recovered");

    const auto o = brute_force_unprotected<double>(r.a, r.b, r.points, grid, 1e-3);
    total += r.points.size();
    hit += r.points.size() - o.never_hit.size();
    crossed += r.points.size() - o.never_crossed.size();
    for (double d : o.min_distance) closest = std::min(closest, d);
  }
  v.require(hit == 0, "round trip exact, but the proximity oracle hit " + std::to_string(hit) + "/" +
                          std::to_string(total) + " points (closest approach " + fmt("%.2e", closest) +
                          " < hit_tol 1e-3, as dist <= 1/(|t| nu - eta) forces for |t| up to 1e6); no branch ever "
                          "crossed a point: " + std::to_string(crossed) + " crossings");
  v.require(crossed == 0, std::to_string(crossed) + " crossings");
  report(4, "realization round trip", v,
         std::to_string(sets.size()) + " sets recovered, " + std::to_string(total) + " points never hit");
}

// C5
void coverage(const std::vector<RealizedPair<double>>& sets) {
  Verdict v;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-12.0, 12.0);
  double worst = 0;
  int checked = 0;
  for (const auto& r : sets) {
    const double scale = source_scale(r.a);
    for (int i = 0; i < 1000; ++i) {
      const double lambda = u(rng);
      bool in_p = false;
      for (double p : r.points) in_p = in_p || std::abs(p - lambda) <= 1e-10 * scale;
      if (in_p) continue;
      const double t = solve_t(r, lambda);
      const double rel = dist_to_spectrum(eigh(r.a + t * r.b), lambda) / scale;
      worst = std::max(worst, rel);
      ++checked;
      v.require(std::isfinite(t) && rel <= 1e-9, "lambda " + fmt("%.17g", lambda) + ": dist/scale " + fmt("%.3e", rel));
    }
  }
  report(5, "coverage witness", v,
         std::to_string(checked) + " points reached, worst dist/scale " + fmt("%.1e", worst));
}

// C6
void pole_construction() {
  Verdict v;
  std::vector<double> mu(10);
  for (int k = 0; k < 10; ++k) mu[k] = k;
  const auto c = realize_via_poles<double>(mu);
  v.require(c.points.size() == 9, "expected 9 points on 0..9");
  for (std::size_t k = 0; k < c.points.size(); ++k)
    v.require(c.points[k].lambda > mu[k] && c.points[k].lambda < mu[k + 1] && c.points[k].residual <= 1e-8,
              "point " + std::to_string(k) + " outside its gap");
  const auto cross = protected_set(c.pair.a, c.pair.b);
  v.require(cross.protected_points.size() == 9, "protected_set disagrees on 0..9");

  std::vector<double> h;
  for (int k = 1; k <= 20; ++k) h.push_back(1.0 / k);
  const auto ch = realize_via_poles<double>(h);
  v.require(ch.points.size() == 19, "expected 19 points on 1/k");
  for (std::size_t k = 0; k < ch.points.size(); ++k)
    v.require(ch.points[k].lambda > 1.0 / static_cast<double>(20 - k) &&
                  ch.points[k].lambda < 1.0 / static_cast<double>(19 - k) && ch.points[k].residual <= 1e-8,
              "harmonic point " + std::to_string(k) + " does not interleave");
  const double smallest = ch.points.empty() ? 0 : ch.points.front().lambda;
  v.require(smallest > 1.0 / 20 && smallest < 1.0 / 19, "smallest point not in (1/20, 1/19)");
  report(6, "pole construction", v, "9 points on 0..9, 19 interleaved on 1/k, smallest " + fmt("%.15g", smallest));
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const char* name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  std::string matrix(const std::string& name, const Sym& m) const {
    std::ofstream(file(name), std::ios::binary) << io::matrix_document(m, name);
    return file(name);
  }
};

int run_cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  return code;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// C7
void indefinite_control() {
  Verdict v;
  const auto ts = linear_grid(-100.0, 100.0, 2001);
  const auto f = spectral_flow<double>(example_a(), indefinite_b(), ts);
  double err = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double s = std::sqrt(1 + ts[i] * ts[i]);
    err = std::max({err, std::abs(f.branches[i][0] + s), std::abs(f.branches[i][1] - s)});
  }
  v.require(err <= 1e-10, "branch error " + fmt("%.3e", err));

  std::vector<double> lambdas;
  for (int i = -99; i <= 99; ++i) lambdas.push_back(0.01 * i);
  const auto o = brute_force_unprotected<double>(example_a(), indefinite_b(), lambdas, standard_t_grid(), 1e-3);
  v.require(o.never_hit.size() == lambdas.size(), "oracle hit an interior point");

  TempDir dir("protect_acceptance_c7");
  const int code = run_cli({"analyze", dir.matrix("a.json", example_a()), dir.matrix("b.json", indefinite_b())});
  v.require(code == cli::kInvalidInput, "analyze exit " + std::to_string(code) + ", expected 3");
  report(7, "indefinite negative control", v,
         "branches err " + fmt("%.1e", err) + ", 199/199 interior points never hit, analyze exits 3");
}

// C8
void herglotz_machinery() {
  Verdict v;
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> wd(0.0, 2.0), frac(0.05, 0.95);
  std::uniform_int_distribution<int> zero(0, 5);
  auto random_h = [&] {
    const auto poles = random_separated(rng, static_cast<std::size_t>(count(rng)), -10, 10, 1e-2);
    HerglotzScalar<double> h{poles, {}};
    for (std::size_t k = 0; k < poles.size(); ++k) h.weights.push_back(zero(rng) == 0 ? 0.0 : wd(rng));
    return h;
  };
  using Gap = SpectralGap<double>;
  constexpr double inf = std::numeric_limits<double>::infinity();

  int samples = 0;
  double worst_fd = 0;
  while (samples < 1000) {
    const auto h = random_h();
    if (h.total_weight() == 0) continue;
    for (std::size_t k = 0; k + 1 < h.poles.size() && samples < 1000; ++k) {
      const double a = h.poles[k], b = h.poles[k + 1];
      const double x = a + frac(rng) * (b - a), delta = 1e-5 * (b - a);
      const double exact = h.derivative(x);
      const double rel = std::abs((h(x + delta) - h(x - delta)) / (2 * delta) - exact) / exact;
      worst_fd = std::max(worst_fd, rel);
      ++samples;
    }
  }
  v.require(worst_fd <= 1e-6, "derivative mismatch " + fmt("%.3e", worst_fd));

  int multi = 0, ray_roots = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto h = random_h();
    if (gap_root(h, Gap{-inf, h.poles.front(), Gap::Kind::left_unbounded})) ++ray_roots;
    if (gap_root(h, Gap{h.poles.back(), inf, Gap::Kind::right_unbounded})) ++ray_roots;
    for (std::size_t k = 0; k + 1 < h.poles.size(); ++k) {
      const double a = h.poles[k], b = h.poles[k + 1];
      int changes = 0;
      double prev = h(a + 1e-6 * (b - a));
      for (int j = 1; j <= 400; ++j) {
        const double f = h(a + (b - a) * (1e-6 + (1 - 2e-6) * j / 400.0));
        if ((prev < 0) != (f < 0)) ++changes;
        prev = f;
      }
      const auto r = gap_root(h, Gap{a, b, Gap::Kind::bounded});
      if (changes > 1 || (changes == 1) != r.has_value()) ++multi;
    }
  }
  v.require(multi == 0, std::to_string(multi) + " gaps with more than one root or a missed root");
  v.require(ray_roots == 0, std::to_string(ray_roots) + " roots on unbounded gaps");
  report(8, "Herglotz machinery", v, "worst finite-difference error " + fmt("%.1e", worst_fd) +
                                         ", at most one root per gap, none on rays (1000 configurations)");
}

// C9
void trace_motion() {
  Verdict v;
  std::mt19937_64 rng(9);
  const std::vector<double> ts{-10, -1, 0, 1, 10};
  double worst_trace = 0, least_motion = 1e300;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(i) % 12;
    const auto a = random_symmetric(rng, n);
    const auto b = random_psd(rng, n, 1 + static_cast<std::size_t>(i) % n);
    const auto f = spectral_flow<double>(a, b, ts);
    worst_trace = std::max(worst_trace, f.trace_defect(a, b));
    const auto& at0 = f.branches[2];
    const auto& at1 = f.branches[3];
    double motion = 0;
    for (std::size_t k = 0; k < n; ++k) motion = std::max(motion, std::abs(at1[k] - at0[k]));
    least_motion = std::min(least_motion, motion / source_scale(a));
    v.require(motion > 1e-9 * source_scale(a), "spectrum did not move for instance " + std::to_string(i));
  }
  v.require(worst_trace <= 1e-9, "trace defect " + fmt("%.3e", worst_trace));
  report(9, "trace motion", v,
         "trace defect " + fmt("%.1e", worst_trace) + ", least relative motion at t=1 " + fmt("%.1e", least_motion));
}

// C10
void cli_contract() {
  Verdict v;
  TempDir dir("protect_acceptance_c10");
  const auto a = dir.matrix("a.json", example_a());
  const auto b = dir.matrix("b.json", example_b());

  v.require(run_cli({"analyze", a, b, "--out", dir.file("r1.json")}) == 0, "analyze failed");
  v.require(run_cli({"analyze", a, b, "--out", dir.file("r2.json")}) == 0, "analyze failed");
  v.require(slurp(dir.file("r1.json")) == slurp(dir.file("r2.json")), "reports differ between runs");
  for (const char* name : {"f1.csv", "f2.csv"})
    v.require(run_cli({"flow", a, b, "--t-min", "-5", "--t-max", "5", "--t-steps", "41", "--out", dir.file(name)}) == 0,
              "flow failed");
  v.require(slurp(dir.file("f1.csv")) == slurp(dir.file("f2.csv")), "CSVs differ between runs");

  std::mt19937_64 rng(10);
  for (int i = 0; i < 10; ++i) {
    const auto p = random_separated(rng, 1 + static_cast<std::size_t>(i), -10, 10, 1e-2);
    std::string list;
    for (double x : p) list += (list.empty() ? "" : ",") + io::format_shortest(x);
    v.require(run_cli({"realize", "--points", list, "--out-a", dir.file("ra.json"), "--out-b", dir.file("rb.json")}) == 0,
              "realize failed");
    std::string out;
    v.require(run_cli({"analyze", dir.file("ra.json"), dir.file("rb.json")}, &out) == 0, "analyze of realized pair failed");
    std::istringstream lines(out);
    std::vector<double> got;
    for (std::string line; std::getline(lines, line);) got.push_back(std::stod(line));
    bool ok = got.size() == p.size();
    for (std::size_t k = 0; ok && k < p.size(); ++k) ok = std::abs(got[k] - p[k]) <= 1e-9;
    v.require(ok, "realize/analyze round trip failed for " + list);
  }
  const auto m = random_symmetric(rng, 6, 1e3);
  v.require(io::parse_matrix_document(io::matrix_document(m)).matrix == m, "matrix file round trip not exact");

  const auto ind = dir.matrix("ind.json", indefinite_b());
  const auto zero = dir.matrix("zero.json", Sym::zero(2));
  std::ofstream(dir.file("short.json")) << R"({"n": 2, "matrix": [1, 2, 3]})";
  std::ofstream(dir.file("asym.json")) << R"({"n": 2, "matrix": [1, 2, 3, 1]})";
  std::ofstream(dir.file("junk.json")) << "not json";
  const std::vector<std::pair<std::vector<std::string>, int>> table{
      {{"analyze", a, b}, 0},
      {{"analyze", dir.file("short.json"), b}, 2},
      {{"analyze", dir.file("junk.json"), b}, 2},
      {{"analyze", dir.file("missing.json"), b}, 2},
      {{"frobnicate"}, 2},
      {{"realize", "--points", "1,1"}, 2},
      {{"flow", a, b, "--t-min", "1", "--t-max", "0", "--t-steps", "3"}, 2},
      {{"analyze", dir.file("asym.json"), b}, 3},
      {{"analyze", a, ind}, 3},
      {{"verify", a, b, "--lambda", "1"}, 3},
      {{"analyze", a, zero}, 4},
      {{"verify", a, b, "--lambda", "0", "--tol", "-1"}, 5},
      {{"verify", a, b, "--lambda", "0"}, 0},
      {{"verify", a, b, "--lambda", "0.3"}, 0},
  };
  for (const auto& [args, expected] : table) {
    const int code = run_cli(args);
    std::string joined;
    for (const auto& s : args) joined += " " + s;
    v.require(code == expected, "exit " + std::to_string(code) + " (expected " + std::to_string(expected) + ") for" + joined);
  }
  report(10, "CLI contract", v,
         "byte-identical reruns, round trips within 1e-9, " + std::to_string(table.size()) + " exit-code cases");
}

}  // namespace

int main() {
  example_golden();
  distance_sandwich();
  equivalence_randomized();
  std::mt19937_64 rng(4);
  const auto sets = random_sets(rng, 50);
  realization_round_trip(sets);
  coverage(sets);
  pole_construction();
  indefinite_control();
  herglotz_machinery();
  trace_motion();
  cli_contract();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
