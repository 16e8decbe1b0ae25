// Experiment kinds, one per acceptance check or calibration.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "sconv/arith.hpp"
#include "sconv/deltamethod.hpp"
#include "sconv/expsums.hpp"
#include "sconv/harness/config.hpp"
#include "sconv/harness/output.hpp"
#include "sconv/harness/parallel.hpp"
#include "sconv/shifted.hpp"
#include "sconv/specialfn.hpp"
#include "sconv/voronoi.hpp"
#include "sconv/voronoi/integrals.hpp"

namespace sconv::harness {

namespace fs = std::filesystem;

enum class Status { pass, fail, report, skipped };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "PASS";
    case Status::fail: return "FAIL";
    case Status::report: return "REPORT";
    case Status::skipped: return "SKIPPED";
  }
  return "?";
}

inline Status parse_status(const std::string& s) {
  if (s == "PASS") return Status::pass;
  if (s == "FAIL") return Status::fail;
  if (s == "REPORT") return Status::report;
  return Status::skipped;
}

struct CriterionResult {
  int id = 0;
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  Status status = Status::skipped;
  std::string detail;

  JsonRecord json() const {
    JsonRecord r;
    r.add("criterion", static_cast<std::int64_t>(id)).add("name", name).add("measured", measured);
    r.add("threshold", threshold).add("status", std::string(to_string(status))).add("detail", detail);
    return r;
  }
};

struct RunResult {
  std::vector<CriterionResult> criteria;
  JsonLines records;
  // Wall-clock numbers live apart so the other outputs stay byte-stable.
  JsonLines timing;
  std::map<std::string, CsvTable> tables;

  void time(const std::string& what, double secs) {
    JsonRecord j;
    j.add("what", what).add("seconds", secs);
    timing.add(j);
  }

  bool hard_failure() const {
    for (const auto& c : criteria)
      if (c.status == Status::fail) return true;
    return false;
  }
};

inline Status verdict(bool ok) { return ok ? Status::pass : Status::fail; }

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string fmt_short(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

inline shifted::TestFunction test_function(const Config& c, const std::string& key, double X) {
  const auto profile = c.str(key, "plateau");
  if (profile == "skew") return shifted::TestFunction::dyadic_skew(X);
  try {
    return shifted::TestFunction::dyadic(X, profile);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

inline arith::DirichletCharacter character(std::int64_t modulus, const std::string& key) {
  if (modulus == 4) return arith::chi4();
  if (modulus < 3) throw ConfigError(key, "character modulus must be 4 or an odd prime");
  for (std::int64_t p = 2; p * p <= modulus; ++p)
    if (modulus % p == 0) throw ConfigError(key, "character modulus must be 4 or an odd prime");
  return arith::prime_character(modulus, 1);
}

/// Real odd primitive character mod 4 or mod a prime p = 3 (mod 4).
inline arith::DirichletCharacter real_character(std::int64_t modulus, const std::string& key) {
  if (modulus == 4) return arith::chi4();
  const auto chi = character(modulus, key);
  if (chi.modulus() % 4 != 3) throw ConfigError(key, "real odd character needs p = 3 mod 4");
  return arith::prime_character(modulus, (modulus - 1) / 2);
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline RunResult run_delta_identity(const ExperimentConfig& e) {
  const auto& c = e.raw;
  const double Q = c.num("delta.Q", 100);
  const std::int64_t m_max = c.integer("delta.m_max", 10000);
  const double tol = c.num("delta.tol", 1e-8);
  const double budget = c.num("delta.seconds", 120);
  if (!(Q > 0)) throw ConfigError("delta.Q", "must be positive");
  if (m_max < 0) throw ConfigError("delta.m_max", "must be non-negative");
  const auto t0 = std::chrono::steady_clock::now();
  const delta::DeltaKernel kernel(Q);
  const std::size_t n = static_cast<std::size_t>(2 * m_max + 1);
  const auto values = ordered_map<double>(n, e.workers, [&](std::size_t i) {
    return delta::delta_symbol(kernel, static_cast<std::int64_t>(i) - m_max);
  });
  RunResult out;
  CsvTable t("n,value");
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t m = static_cast<std::int64_t>(i) - m_max;
    t.row({m, values[i]});
    worst = std::max(worst, std::abs(values[i] - (m == 0 ? 1.0 : 0.0)));
  }
  out.tables.emplace("delta.csv", t);
  const double secs = detail::seconds_since(t0);
  out.criteria.push_back({1, "delta-symbol exactness", worst, tol, verdict(worst < tol && secs <= budget),
                          "Q=" + detail::fmt_short(Q) + " |m|<=" + std::to_string(m_max)});
  out.time("delta", secs);
  return out;
}

inline RunResult run_voronoi_verify(const ExperimentConfig& e) {
  using voronoi::Sequence;
  using voronoi::VoronoiCase;
  const auto& c = e.raw;
  const std::int64_t q_max = c.integer("voronoi.q_max", 30);
  const double alpha = c.num("voronoi.alpha", 1000), beta = c.num("voronoi.beta", 2000);
  const double tol = c.num("voronoi.tol", 1e-9);
  const double accept = c.num("voronoi.accept_tol", 1e-6);
  const double budget = c.num("voronoi.seconds", 600);
  const int weight = static_cast<int>(c.integer("voronoi.weight", 12));
  const auto moduli = c.int_list("voronoi.characters", {3, 4, 5, 7});
  if (tol < 1e-10) throw ConfigError("voronoi.tol", "must be >= 1e-10");
  if (!(alpha > 0 && beta > alpha)) throw ConfigError("voronoi.alpha", "need 0 < alpha < beta");
  std::vector<arith::DirichletCharacter> chis;
  for (auto m : moduli) chis.push_back(detail::character(m, "voronoi.characters"));
  const auto g = special::SmoothBump::standard(alpha, beta);
  voronoi::RhsOptions ro;
  ro.tol = tol;

  struct Row {
    std::string label;
    std::int64_t q, d;
    cplx lhs, rhs;
    double rel;
    std::int64_t n_star;
    bool converged;
  };
  const auto t0 = std::chrono::steady_clock::now();
  // One verifier per worker keeps the transform caches private.
  std::vector<std::unique_ptr<voronoi::VoronoiVerifier>> pool;
  for (int w = 0; w < std::max(1, e.workers); ++w) pool.push_back(std::make_unique<voronoi::VoronoiVerifier>(g));
  std::mutex slot_mutex;
  std::vector<int> free_slots(pool.size());
  std::iota(free_slots.begin(), free_slots.end(), 0);
  auto rows = ordered_map<std::vector<Row>>(static_cast<std::size_t>(q_max), e.workers, [&](std::size_t i) {
    int slot;
    {
      std::lock_guard<std::mutex> lock(slot_mutex);
      slot = free_slots.back();
      free_slots.pop_back();
    }
    auto& V = *pool[slot];
    const std::int64_t q = static_cast<std::int64_t>(i) + 1;
    std::vector<Row> rs;
    for (std::int64_t d = 1; d <= q; ++d) {
      if (gcd(d, q) != 1) continue;
      std::vector<VoronoiCase> cs;
      cs.push_back({Sequence::divisor, {}, weight, q, d});
      for (const auto& chi : chis) {
        if (gcd(chi.modulus(), q) == 1) cs.push_back({Sequence::tau_chi_coprime, chi, weight, q, d});
        else if (q % chi.modulus() == 0) cs.push_back({Sequence::tau_chi_dividing, chi, weight, q, d});
      }
      if (q % 4 == 2) cs.push_back({Sequence::r_half, {}, weight, q, d});
      cs.push_back({Sequence::cusp, {}, weight, q, d});
      for (const auto& vc : cs) {
        const cplx l = V.lhs(vc);
        const auto r = V.rhs(vc, ro);
        const double rel = std::abs(l - r.value()) / std::max(std::abs(l), 1.0);
        rs.push_back({vc.label(), q, d, l, r.value(), rel, r.n_star, r.converged});
      }
    }
    {
      std::lock_guard<std::mutex> lock(slot_mutex);
      free_slots.push_back(slot);
    }
    return rs;
  });
  RunResult out;
  CsvTable t("case,q,d,lhs_re,lhs_im,rhs_re,rhs_im,rel_err,Nstar");
  double worst = 0.0;
  std::int64_t cases = 0, unconverged = 0;
  for (const auto& rs : rows)
    for (const auto& r : rs) {
      t.row({r.label, r.q, r.d, r.lhs.real(), r.lhs.imag(), r.rhs.real(), r.rhs.imag(), r.rel, r.n_star});
      worst = std::max(worst, r.rel);
      ++cases;
      unconverged += r.converged ? 0 : 1;
    }
  out.tables.emplace("voronoi.csv", t);
  const double secs = detail::seconds_since(t0);
  out.criteria.push_back({2, "Voronoi verification", worst, accept,
                          verdict(worst < accept && unconverged == 0 && secs <= budget),
                          std::to_string(cases) + " cases, q<=" + std::to_string(q_max) +
                              " unconverged=" + std::to_string(unconverged)});
  out.time("voronoi", secs);
  return out;
}

inline RunResult run_weil_bound(const ExperimentConfig& e) {
  const auto& c = e.raw;
  const std::int64_t q_max = c.integer("weil.q_max", 2000);
  const std::int64_t samples = c.integer("weil.samples", 100);
  const std::int64_t range = c.integer("weil.range", 1000000);
  const double slack = c.num("weil.tol", 1e-9);
  if (q_max < 1 || samples < 1 || range < 1) throw ConfigError("weil", "q_max, samples, range must be positive");
  struct Row {
    std::int64_t m, n;
    double s, bound;
  };
  const arith::FactorSieve sieve(std::max<std::int64_t>(q_max, 2));
  const auto rows = ordered_map<std::vector<Row>>(static_cast<std::size_t>(q_max), e.workers, [&](std::size_t i) {
    const std::int64_t q = static_cast<std::int64_t>(i) + 1;
    std::mt19937_64 rng(e.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(q));
    std::uniform_int_distribution<std::int64_t> dist(-range, range);
    const double dq = static_cast<double>(arith::divisor_k(q, 2, sieve));
    std::vector<Row> rs;
    for (std::int64_t k = 0; k < samples; ++k) {
      const std::int64_t m = dist(rng), n = dist(rng);
      const std::int64_t g = gcd(gcd(m, n), q);
      const double s = expsums::kloosterman(m, n, q);
      rs.push_back({m, n, s, dq * std::sqrt(static_cast<double>(g)) * std::sqrt(static_cast<double>(q))});
    }
    return rs;
  });
  RunResult out;
  CsvTable t("q,m,n,kloosterman,bound,ratio");
  std::int64_t violations = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& r : rows[i]) {
      const double ratio = std::abs(r.s) / r.bound;
      worst = std::max(worst, ratio);
      if (std::abs(r.s) > r.bound * (1.0 + slack) + slack) ++violations;
      t.row({static_cast<std::int64_t>(i + 1), r.m, r.n, r.s, r.bound, ratio});
    }
  out.tables.emplace("weil.csv", t);
  out.criteria.push_back({3, "Weil bound", static_cast<double>(violations), 0.0, verdict(violations == 0),
                          "max |S|/bound=" + detail::fmt_short(worst) + " over q<=" + std::to_string(q_max)});
  return out;
}

inline RunResult run_hyperbola_identity(const ExperimentConfig& e) {
  const auto& c = e.raw;
  const double Q = c.num("hyperbola.Q", 10000);
  const double tol = c.num("hyperbola.tol", 1e-9);
  const shifted::HyperbolaState H(Q);
  const auto n_hi = static_cast<std::int64_t>(std::ceil(Q)) - 1;
  const auto d = arith::divisor_table(n_hi + 1);
  RunResult out;
  CsvTable t("n,value");
  double worst = 0.0;
  for (std::int64_t n = 1; n <= n_hi; ++n) {
    const double dev = H.divisor_sum(n) - static_cast<double>(d[n]);
    worst = std::max(worst, std::abs(dev));
    t.row({n, dev});
  }
  out.tables.emplace("hyperbola.csv", t);
  out.criteria.push_back({4, "hyperbola identity", worst, tol, verdict(worst < tol), "n<" + detail::fmt_short(Q)});
  return out;
}

inline RunResult run_lemcon(const ExperimentConfig& e) {
  const auto& c = e.raw;
  const std::int64_t limit = c.integer("lemcon.limit", 500);
  const auto hs = c.int_list("lemcon.h", {1, 2, 7});
  const double tol = c.num("lemcon.tol", 1e-10);
  const auto general = c.int_list("lemcon.general", {3, 2});
  if (general.size() != 2) throw ConfigError("lemcon.general", "expected k, l");
  const double L = static_cast<double>(limit);
  const auto u = special::SmoothBump::plateau(0.5, 0.1 * L, 0.7 * L, L + 0.5);
  const auto v = special::SmoothBump::standard(0.5, 0.8 * L);
  auto f = [&](std::int64_t n, std::int64_t m) { return u(static_cast<double>(n)) * v(static_cast<double>(m)); };
  RunResult out;
  CsvTable t("k,l,h,lhs,rhs,rel_err");
  double worst = 0.0;
  std::vector<std::pair<int, int>> kl{{2, 2}, {static_cast<int>(general[0]), static_cast<int>(general[1])}};
  for (auto [k, l] : kl)
    for (auto h : hs) {
      const auto r = shifted::lem_con_check(f, h, limit, k, l);
      const double rel = std::abs(r.lhs - r.rhs) / std::max(std::abs(r.rhs), 1e-300);
      worst = std::max(worst, rel);
      t.row({static_cast<std::int64_t>(k), static_cast<std::int64_t>(l), h, r.lhs, r.rhs, rel});
    }
  out.tables.emplace("lemcon.csv", t);
  out.criteria.push_back({5, "lem-con identity", worst, tol, verdict(worst < tol),
                          "limit=" + std::to_string(limit) + " incl. (k,l)=(" + std::to_string(general[0]) + "," +
                              std::to_string(general[1]) + ")"});
  return out;
}

inline RunResult run_partition_unity(const ExperimentConfig& e) {
  const auto& c = e.raw;
  const std::int64_t points = c.integer("partition.points", 10000);
  const double lo = c.num("partition.x_min", 1e-2), hi = c.num("partition.x_max", 1e4);
  const double tol = c.num("partition.tol", 1e-10);
  if (points < 2 || !(lo > 0 && hi > lo)) throw ConfigError("partition", "need points >= 2 and 0 < x_min < x_max");
  const special::DyadicPartition rho;
  RunResult out;
  CsvTable t("x,deviation");
  double worst = 0.0;
  for (std::int64_t i = 0; i < points; ++i) {
    const double x = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(points - 1));
    const double dev = rho.partition_sum(x) - 1.0;
    worst = std::max(worst, std::abs(dev));
    t.row({x, dev});
  }
  out.tables.emplace("partition.csv", t);
  out.criteria.push_back({6, "partition of unity", worst, tol, verdict(worst < tol),
                          std::to_string(points) + " log-spaced points"});
  return out;
}

struct DecayRow {
  std::int64_t n;
  special::QuadResult I_nmq, I_nqd;
};

inline std::vector<DecayRow> decay_scan(double X, std::int64_t q, std::int64_t m, std::int64_t a, std::int64_t d,
                                        std::int64_t h, const shifted::TestFunction& f,
                                        const std::vector<std::int64_t>& ns, int workers) {
  const delta::ShiftKernelE E(f, h, delta::DeltaKernel(delta::default_Q(X)));
  const shifted::HyperbolaState K(2.0 * X / static_cast<double>(a));
  return ordered_map<DecayRow>(ns.size(), workers, [&](std::size_t i) {
    const auto n = ns[i];
    return DecayRow{n, voronoi::integral_I(n, m, q, E), voronoi::integral_I_quad(n, q, d, K, f, h, a)};
  });
}

inline RunResult run_small_q_decay(const ExperimentConfig& e) {
  const auto& c = e.raw;
  const double X = c.num("decay.X", 1e4);
  const double q_exp = c.num("decay.q_exponent", 0.4);
  const std::int64_t m = c.integer("decay.m", 1), a = c.integer("decay.a", 1), d = c.integer("decay.d", 1);
  const std::int64_t h = c.integer("decay.h", 1);
  const auto ns = c.int_list("decay.n", {1, 2, 4, 8, 16});
  const double C = c.num("decay.constant");
  const auto f = detail::test_function(c, "decay.profile", X);
  const auto q = static_cast<std::int64_t>(std::floor(std::pow(X, q_exp)));
  const auto rows = decay_scan(X, q, m, a, d, h, f, ns, e.workers);
  RunResult out;
  CsvTable t("n,I_nmq,I_nmq_err,I_nqd,I_nqd_err,scaled");
  bool dec1 = true, dec2 = true, conv = true;
  double worst_scaled = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double nd = static_cast<double>(r.n);
    const double scaled = std::abs(r.I_nqd.value) * nd * nd * X;
    worst_scaled = std::max(worst_scaled, scaled);
    conv = conv && r.I_nmq.converged && r.I_nqd.converged;
    if (i > 0) {
      dec1 = dec1 && std::abs(r.I_nmq.value) < std::abs(rows[i - 1].I_nmq.value);
      dec2 = dec2 && std::abs(r.I_nqd.value) < std::abs(rows[i - 1].I_nqd.value);
    }
    t.row({r.n, r.I_nmq.value, r.I_nmq.error, r.I_nqd.value, r.I_nqd.error, scaled});
  }
  out.tables.emplace("decay.csv", t);
  const bool ok = dec1 && dec2 && conv && worst_scaled <= C;
  out.criteria.push_back({7, "small-q decay", worst_scaled, C, verdict(ok),
                          std::string("q=") + std::to_string(q) + " |I(n,m,q)| decreasing=" + (dec1 ? "yes" : "no") +
                              " |I(n,q,d)| decreasing=" + (dec2 ? "yes" : "no") +
                              " quadrature converged=" + (conv ? "yes" : "no")});
  return out;
}

inline RunResult run_negligible_tail(const ExperimentConfig& e) {
  const auto& c = e.raw;
  const double X = c.num("tail.X", 1e4);
  const auto q_exps = c.list("tail.q_exponents", {0.48, 0.5, 0.52});
  const std::int64_t n_cap = c.integer("tail.n_cap", 100);
  const double limit = c.num("tail.ratio", 1e-3);
  const std::int64_t h = c.integer("tail.h", 1);
  const auto f = detail::test_function(c, "tail.profile", X);
  const double cut = std::pow(X, 3.0 * e.eps);
  const delta::ShiftKernelE E(f, h, delta::DeltaKernel(delta::default_Q(X)));
  const auto dt = arith::divisor_table(n_cap + 1);
  struct Row {
    std::int64_t q;
    double retained, tail, refine;
  };
  const auto rows = ordered_map<Row>(q_exps.size(), e.workers, [&](std::size_t i) {
    const auto q = static_cast<std::int64_t>(std::llround(std::pow(X, q_exps[i])));
    const int P = 2 * voronoi::detail::start_panels(E, q, n_cap);
    const voronoi::KernelGrid G(E, q, P), G2(E, q, 2 * P);
    auto bessel_vec = [&](const std::vector<double>& pts, std::int64_t n) {
      std::vector<double> v(pts.size());
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = special::bessel_y0(voronoi::detail::bessel_arg(n, q, pts[k]));
      return v;
    };
    std::vector<std::vector<double>> xs(n_cap + 1), ys(n_cap + 1);
    for (std::int64_t n = 1; n <= n_cap; ++n) {
      xs[n] = bessel_vec(G.x(), n);
      ys[n] = bessel_vec(G.y(), n);
    }
    KahanSum<double> keep, tail;
    for (std::int64_t mm = 1; mm <= n_cap; ++mm)
      for (std::int64_t n = 1; n <= n_cap; ++n) {
        const double I = 4.0 * kPi * kPi * G.contract(xs[mm], ys[n]).first;
        const double w = static_cast<double>(dt[n] * dt[mm]) * std::abs(I);
        if (mm <= cut && n <= cut) keep.add(w);
        else if (mm > cut && n > cut) tail.add(w);
      }
    const double a = G.contract(xs[n_cap], ys[n_cap]).first;
    const double b = G2.contract(bessel_vec(G2.x(), n_cap), bessel_vec(G2.y(), n_cap)).first;
    return Row{q, keep.value(), tail.value(), std::abs(a - b) / std::max(std::abs(b), 1e-300)};
  });
  RunResult out;
  CsvTable t("q,retained,tail,ratio,n_cap,refine_rel");
  double worst = 0.0;
  for (const auto& r : rows) {
    const double ratio = r.tail / r.retained;
    worst = std::max(worst, ratio);
    t.row({r.q, r.retained, r.tail, ratio, n_cap, r.refine});
  }
  out.tables.emplace("tail.csv", t);
  out.criteria.push_back({8, "negligible tail", worst, limit, verdict(worst < limit),
                          "tail truncated at m,n<=" + std::to_string(n_cap) + " (a lower bound); cut X^{3eps}=" +
                              detail::fmt_short(cut)});
  return out;
}

// Binary grids -------------------------------------------------------------

inline std::vector<shifted::ExperimentReport> binary_grid(const std::string& sequence, const std::vector<double>& Xs,
                                                          std::int64_t h, const Config& c, int workers) {
  using shifted::SeqKind;
  return ordered_map<shifted::ExperimentReport>(Xs.size(), workers, [&](std::size_t i) {
    const double X = Xs[i];
    const auto t0 = std::chrono::steady_clock::now();
    const auto f = detail::test_function(c, "grid.profile", X);
    shifted::ExperimentReport r;
    r.kind = "binary";
    r.X = X;
    r.h = h;
    r.Q = delta::default_Q(X);
    if (sequence == "d") {
      shifted::ConvolutionSpec s{{SeqKind::divisor}, {SeqKind::divisor}, 1, 1, h, f};
      r.brute = shifted::brute_shifted_sum(s);
      r.main = shifted::main_term_binary_d(s, r.Q);
    } else if (sequence == "r") {
      shifted::ConvolutionSpec s{{SeqKind::r}, {SeqKind::r}, 1, 1, h, f};
      r.brute = shifted::brute_shifted_sum(s);
      r.main = shifted::main_term_r(s, r.Q);
    } else if (sequence.rfind("tau", 0) == 0) {
      const auto chi = detail::real_character(std::stoll(sequence.substr(3)), "grid.sequences");
      shifted::ConvolutionSpec s{{SeqKind::tau_chi, chi}, {SeqKind::tau_chi, chi}, 1, 1, h, f};
      r.brute = shifted::brute_shifted_sum(s);
      r.main = shifted::main_term_tau_chi(s, r.Q, chi);
    } else {
      throw ConfigError("grid.sequences", "unknown sequence " + sequence);
    }
    r.left = r.right = sequence;
    r.error = r.brute - r.main;
    r.seconds = detail::seconds_since(t0);
    return r;
  });
}

inline CsvTable exponent_table(const std::vector<shifted::ExperimentReport>& reps) {
  CsvTable t("X,a,b,h,brute,main,error,alpha_partial");
  std::vector<double> X, err;
  for (const auto& r : reps) {
    X.push_back(r.X);
    err.push_back(r.error);
    double alpha = std::nan("");
    if (X.size() >= 2) {
      try {
        alpha = shifted::fit_error_exponent(X, err).alpha;
      } catch (const std::exception&) {
      }
    }
    t.row({r.X, r.a, r.b, r.h, r.brute, r.main, r.error, alpha});
  }
  return t;
}

inline JsonRecord report_json(const shifted::ExperimentReport& r) {
  JsonRecord j;
  j.add("kind", r.kind).add("left", r.left).add("right", r.right).add("X", r.X).add("a", r.a).add("b", r.b);
  j.add("h", r.h).add("Q", r.Q).add("brute", r.brute).add("main", r.main).add("error", r.error);
  if (r.alpha) j.add("alpha", *r.alpha);
  for (const auto& [k, v] : r.extra) j.add(k, v);
  return j;
}

/// Hard envelope |error| <= C X^{3/4} over the grid plus a report-only exponent fit.
inline void envelope_criteria(RunResult& out, int id, const std::string& label,
                              std::vector<shifted::ExperimentReport>& reps, double C, double theta) {
  double worst = 0.0;
  for (const auto& r : reps) worst = std::max(worst, std::abs(r.error) / std::pow(r.X, 0.75));
  std::optional<shifted::ExponentFit> F;
  std::string fit = "fit unavailable";
  try {
    F = shifted::fit_error_exponent(reps);
    for (auto& r : reps) r.alpha = F->alpha;
    fit = "alpha=" + detail::fmt_short(F->alpha) + "+-" + detail::fmt_short(2.0 * F->alpha_stderr) +
          " vs 1/2+theta=" + detail::fmt_short(0.5 + theta);
  } catch (const std::exception& ex) {
    fit = ex.what();
  }
  out.criteria.push_back({id, label + " |brute-main|/X^{3/4}", worst, C, verdict(worst <= C),
                          "C frozen from the X=2^10 calibration; " + fit});
  if (F) out.criteria.push_back({id, label + " fitted exponent", F->alpha, 0.5 + theta, Status::report, fit});
}

inline RunResult run_binary_dd(const ExperimentConfig& e) {
  const auto& c = e.raw;
  const auto Xs = c.list("grid.X");
  const std::int64_t h = c.integer("grid.h", 1);
  const double C = c.num("grid.C");
  const double budget = c.num("grid.seconds", 3600);
  const auto t0 = std::chrono::steady_clock::now();
  auto reps = binary_grid("d", Xs, h, c, e.workers);
  RunResult out;
  envelope_criteria(out, 9, "d*d", reps, C, theta_value(e.theta));
  const double secs = detail::seconds_since(t0);
  if (secs > budget) out.criteria.front().status = Status::fail;
  out.time("binary-dd", secs);
  for (const auto& r : reps) {
    out.records.add(report_json(r));
    out.time("X=" + fmt17(r.X), r.seconds);
  }
  out.tables.emplace("binary_dd.csv", exponent_table(reps));
  return out;
}

inline RunResult run_binary_tau(const ExperimentConfig& e, std::vector<std::string> default_seqs) {
  const auto& c = e.raw;
  const auto Xs = c.list("grid.X");
  std::vector<std::string> seqs;
  {
    std::stringstream ss(c.str("grid.sequences", ""));
    std::string s;
    while (std::getline(ss, s, ',')) {
      s = detail::trim(s);
      if (!s.empty()) seqs.push_back(s);
    }
    if (seqs.empty()) seqs = default_seqs;
  }
  RunResult out;
  for (const auto& s : seqs) {
    const std::int64_t h = c.integer("grid.h_" + s);
    if (s == "r" && h % 4) throw ConfigError("grid.h_r", "must be divisible by 4");
    auto reps = binary_grid(s, Xs, h, c, e.workers);
    envelope_criteria(out, 11, s, reps, c.num("grid.C_" + s), theta_value(e.theta));
    for (const auto& r : reps) out.records.add(report_json(r));
    out.tables.emplace("binary_" + s + ".csv", exponent_table(reps));
  }
  return out;
}

/// d(n) a(m) with n - m = h: brute force only, there is no main term to compare.
inline RunResult run_binary_cusp(const ExperimentConfig& e) {
  using shifted::SeqKind;
  const auto& c = e.raw;
  const auto Xs = c.list("grid.X");
  const std::int64_t h = c.integer("grid.h", 1);
  auto reps = ordered_map<shifted::ExperimentReport>(Xs.size(), e.workers, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto f = detail::test_function(c, "grid.profile", Xs[i]);
    shifted::ConvolutionSpec s{{SeqKind::divisor}, {SeqKind::cusp}, 1, 1, h, f};
    shifted::ExperimentReport r;
    r.kind = "binary-cusp";
    r.left = "d";
    r.right = "a";
    r.X = Xs[i];
    r.h = h;
    r.brute = shifted::brute_shifted_sum(s);
    r.error = r.brute;
    r.seconds = detail::seconds_since(t0);
    return r;
  });
  RunResult out;
  double worst = 0.0;
  for (const auto& r : reps) worst = std::max(worst, std::abs(r.brute) / std::sqrt(r.X));
  out.criteria.push_back({0, "d*a |sum|/X^{1/2}", worst, 0.0, Status::report, "max over the grid"});
  try {
    const auto F = shifted::fit_error_exponent(reps);
    for (auto& r : reps) r.alpha = F.alpha;
    out.criteria.push_back({0, "d*a fitted exponent", F.alpha, 0.5 + theta_value(e.theta), Status::report,
                            "alpha=" + detail::fmt_short(F.alpha) + "+-" + detail::fmt_short(2 * F.alpha_stderr)});
  } catch (const std::exception&) {
  }
  for (const auto& r : reps) {
    out.records.add(report_json(r));
    out.time("X=" + fmt17(r.X), r.seconds);
  }
  out.tables.emplace("binary_cusp.csv", exponent_table(reps));
  return out;
}

inline RunResult run_quadratic(const ExperimentConfig& e) {
  const auto& c = e.raw;
  const auto Xs = c.list("grid.X");
  const auto as = c.int_list("grid.a", {1, 2, 3, 6});
  const std::int64_t h = c.integer("grid.h", 1);
  const double dual_X = c.num("dual.X", 0.0);
  const auto dual_as = c.int_list("dual.a", {1, 2, 3});
  const double accept = c.num("dual.accept_tol", 1e-3);
  RunResult out;
  using shifted::SeqKind;
  for (auto a : as) {
    auto reps = ordered_map<shifted::ExperimentReport>(Xs.size(), e.workers, [&](std::size_t i) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto f = detail::test_function(c, "grid.profile", Xs[i]);
      shifted::ConvolutionSpec s{{SeqKind::divisor}, {SeqKind::divisor}, a, 1, h, f};
      shifted::QuadraticOptions o;
      o.eps = e.eps;
      o.dual = false;
      const auto q = shifted::quadratic_pipeline(s, o);
      shifted::ExperimentReport r;
      r.kind = "quadratic";
      r.X = Xs[i];
      r.a = a;
      r.h = h;
      r.Q = q.Q;
      r.brute = q.brute;
      r.main = q.main;
      r.error = q.error();
      r.seconds = detail::seconds_since(t0);
      return r;
    });
    if (reps.size() >= 4) {
      const auto F = shifted::fit_error_exponent(reps);
      for (auto& r : reps) r.alpha = F.alpha;
      out.criteria.push_back({9, "quadratic a=" + std::to_string(a) + " fitted exponent", F.alpha,
                              0.5 + theta_value(e.theta), Status::report,
                              "alpha=" + detail::fmt_short(F.alpha) + "+-" + detail::fmt_short(2 * F.alpha_stderr) +
                                  " vs 1/2+theta; below 3/4: " + (F.alpha < 0.75 ? "yes" : "no")});
    }
    for (const auto& r : reps) out.records.add(report_json(r));
    out.tables.emplace("quadratic_a" + std::to_string(a) + ".csv", exponent_table(reps));
  }
  if (dual_X > 0) {
    CsvTable t("X,a,h,brute,main,y0_line,k0_line,residual,rel_residual,range_small_q,range_large_n,range_kuznetsov");
    const auto reps = ordered_map<shifted::QuadraticReport>(dual_as.size(), e.workers, [&](std::size_t i) {
      const auto f = detail::test_function(c, "grid.profile", dual_X);
      shifted::ConvolutionSpec s{{SeqKind::divisor}, {SeqKind::divisor}, dual_as[i], 1, h, f};
      shifted::QuadraticOptions o;
      o.eps = e.eps;
      o.tol = c.num("dual.tol", 1e-6);
      return shifted::quadratic_pipeline(s, o);
    });
    double worst = 0.0;
    bool ok = true;
    for (const auto& q : reps) {
      const double rel = std::abs(q.residual()) / std::abs(q.brute);
      worst = std::max(worst, rel);
      ok = ok && q.tallies_ok && q.support_ok && q.converged;
      t.row({q.X, q.a, q.h, q.brute, q.main, q.y0_line, q.k0_line, q.residual(), rel, q.ranges[0], q.ranges[1],
             q.ranges[2]});
      JsonRecord j;
      j.add("kind", std::string("quadratic-dual")).add("X", q.X).add("a", q.a).add("h", q.h).add("brute", q.brute);
      j.add("main", q.main).add("y0_line", q.y0_line).add("k0_line", q.k0_line).add("residual", q.residual());
      j.add("tallies_ok", q.tallies_ok).add("support_ok", q.support_ok).add("converged", q.converged);
      for (const auto& [d, v] : q.by_gcd) j.add("gcd_" + std::to_string(d), v);
      out.records.add(j);
    }
    out.tables.emplace("quadratic_dual.csv", t);
    out.criteria.push_back({0, "quadratic identity main+Y0+K0", worst, accept, verdict(worst < accept && ok),
                            "X=" + detail::fmt_short(dual_X) + "; tallies, K-support and truncation checked"});
  }
  return out;
}

inline RunResult run_kloosterman_avg(const ExperimentConfig& e) {
  const auto& c = e.raw;
  const auto Qs = c.list("kuznetsov.Q", {64, 128, 256, 512, 1024, 2048, 4096});
  const double P = c.num("kuznetsov.P", 64);
  const std::int64_t h = c.integer("kuznetsov.h", 1);
  const std::int64_t N = c.integer("kuznetsov.N", 4);
  const double step_limit = c.num("kuznetsov.max_step", 2.0);
  const auto psi = special::SmoothBump::standard(1.0, 2.0);
  struct Row {
    double Q;
    std::string filter;
    expsums::BilinearResult r;
  };
  std::vector<std::pair<double, expsums::ModulusFilter>> jobs;
  for (auto f : {expsums::ModulusFilter::all, expsums::ModulusFilter::multiples_of_n})
    for (double Q : Qs) jobs.emplace_back(Q, f);
  const auto rows = ordered_map<Row>(jobs.size(), e.workers, [&](std::size_t i) {
    const auto [Q, filt] = jobs[i];
    expsums::BilinearWeight g;
    g.P = P;
    g.Q = Q;
    g.eval = [&psi, P, Q](double p, double q) { return psi(p / P) * psi(q / Q); };
    g.certificate = psi.max_derivative(2) * psi.max_derivative(2);
    std::vector<cplx> coeffs(static_cast<std::size_t>(std::ceil(P)), cplx(1.0, 0.0));
    expsums::BilinearOptions o;
    o.h = h;
    o.filter = filt;
    o.n_modulus = N;
    o.theta = e.theta;
    o.eps = c.num("kuznetsov.eps", 0.01);
    return Row{Q, filt == expsums::ModulusFilter::all ? "all" : "N|q", expsums::bilinear_average(coeffs, g, o)};
  });
  RunResult out;
  CsvTable t("P,Q,h,filter,value_re,value_im,bound,ratio");
  std::map<std::string, std::vector<double>> ratios;
  for (const auto& r : rows) {
    t.row({P, r.Q, h, r.filter, r.r.value.real(), r.r.value.imag(), r.r.lemma_bound, r.r.ratio});
    ratios[r.filter].push_back(r.r.ratio);
  }
  out.tables.emplace("kuznetsov.csv", t);
  double worst = 0.0;
  for (const auto& [k, v] : ratios)
    for (std::size_t i = 1; i < v.size(); ++i) worst = std::max(worst, v[i] / v[i - 1]);
  out.criteria.push_back({10, "Kuznetsov-average ratio step", worst, step_limit, Status::report,
                          std::string("max consecutive ratio step; within 2x: ") + (worst < step_limit ? "yes" : "no")});
  return out;
}

inline RunResult run_bessel_selftest(const ExperimentConfig& e) {
  using special::BesselKind;
  const auto& c = e.raw;
  const std::int64_t points = c.integer("bessel.points", 1000);
  const double lo = c.num("bessel.z_min", 0.1), hi = c.num("bessel.z_max", 100);
  const double tol = c.num("bessel.tol", 1e-10);
  const double dtol = c.num("bessel.derivative_tol", 1e-6);
  if (points < 2 || !(lo > 0 && hi > lo)) throw ConfigError("bessel", "need points >= 2 and 0 < z_min < z_max");
  RunResult out;
  CsvTable t("kind,order,z,value,reference,scaled_err");
  double worst = 0.0, worst_d = 0.0;
  for (auto kind : {BesselKind::J, BesselKind::Y, BesselKind::K})
    for (int n = 0; n <= 2; ++n)
      for (std::int64_t i = 0; i < points; ++i) {
        const double z = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(points - 1));
        const double v = special::bessel(kind, n, z);
        const double ref = kind == BesselKind::J   ? boost::math::cyl_bessel_j(n, z)
                           : kind == BesselKind::Y ? boost::math::cyl_neumann(n, z)
                                                   : boost::math::cyl_bessel_k(n, z);
        // J and Y are measured against their envelope so zeros do not blow up the ratio.
        const double scale = kind == BesselKind::K ? std::abs(ref)
                                                   : std::max(std::abs(ref), std::min(1.0, std::sqrt(2.0 / (kPi * z))));
        const double err = std::abs(v - ref) / scale;
        worst = std::max(worst, err);
        t.row({std::string(special::to_string(kind)), static_cast<std::int64_t>(n), z, v, ref, err});
        if (n == 1) {
          // C_1' = C_0 - C_1/z for J, Y and K_1' = -K_0 - K_1/z.
          const double d = special::bessel_derivative(kind, 1, z, 1);
          const double c0 = special::bessel(kind, 0, z);
          const double rhs = (kind == BesselKind::K ? -c0 : c0) - v / z;
          worst_d = std::max(worst_d, std::abs(d - rhs) / std::max(std::abs(rhs), scale));
        }
      }
  out.tables.emplace("bessel.csv", t);
  out.criteria.push_back({0, "Bessel values against Boost", worst, tol, verdict(worst < tol),
                          "J, Y, K orders 0-2 on " + std::to_string(points) + " points"});
  out.criteria.push_back({0, "Bessel derivative recurrence", worst_d, dtol, verdict(worst_d < dtol),
                          "C_1' against C_0 - C_1/z"});
  return out;
}

// Calibration of the frozen constants.
inline RunResult run_calibrate(const ExperimentConfig& e) {
  const auto& c = e.raw;
  const auto target = c.str("calibration.target");
  RunResult out;
  CsvTable t("n,value");
  double C = 0.0;
  if (target == "d" || target == "r" || target.rfind("tau", 0) == 0) {
    const double X = c.num("calibration.X", 1024);
    const auto ks = c.int_list("calibration.h_multiples", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
    const std::int64_t step = target == "d" ? 1 : target == "r" ? 4 : std::stoll(target.substr(3));
    for (auto k : ks) {
      const auto reps = binary_grid(target, {X}, k * step, c, 1);
      const double v = std::abs(reps[0].error) / std::pow(X, 0.75);
      t.row({k * step, v});
      C = std::max(C, v);
    }
  } else if (target == "decay") {
    const double X = c.num("calibration.X", 4096);
    const auto ns = c.int_list("calibration.n", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16});
    const auto f = detail::test_function(c, "calibration.profile", X);
    const auto q = static_cast<std::int64_t>(std::floor(std::pow(X, c.num("calibration.q_exponent", 0.4))));
    const auto rows = decay_scan(X, q, 1, 1, 1, 1, f, ns, e.workers);
    for (const auto& r : rows) {
      const double v = std::abs(r.I_nqd.value) * static_cast<double>(r.n * r.n) * X;
      t.row({r.n, v});
      C = std::max(C, v);
    }
  } else {
    throw ConfigError("calibration.target", "unknown target " + target);
  }
  out.tables.emplace("calibration.csv", t);
  out.criteria.push_back({0, "calibration " + target, C, 0.0, Status::report, "max over the calibration sample"});
  return out;
}

}  // namespace sconv::harness
