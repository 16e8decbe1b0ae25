// run / report / selftest entry points.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sconv/harness/experiments.hpp"

namespace sconv::harness {

inline RunResult run_determinism(const ExperimentConfig& e);

inline RunResult execute(const ExperimentConfig& e) {
  const auto& k = e.kind;
  if (k == "delta-identity") return run_delta_identity(e);
  if (k == "voronoi-verify") return run_voronoi_verify(e);
  if (k == "weil-bound") return run_weil_bound(e);
  if (k == "hyperbola-identity") return run_hyperbola_identity(e);
  if (k == "lemcon") return run_lemcon(e);
  if (k == "partition-unity") return run_partition_unity(e);
  if (k == "small-q-decay") return run_small_q_decay(e);
  if (k == "negligible-tail") return run_negligible_tail(e);
  if (k == "binary-dd") return run_binary_dd(e);
  if (k == "binary-tau") return run_binary_tau(e, {"tau3"});
  if (k == "binary-r") return run_binary_tau(e, {"r"});
  if (k == "binary-cusp") return run_binary_cusp(e);
  if (k == "quadratic") return run_quadratic(e);
  if (k == "kloosterman-avg") return run_kloosterman_avg(e);
  if (k == "bessel-selftest") return run_bessel_selftest(e);
  if (k == "calibrate") return run_calibrate(e);
  if (k == "determinism") return run_determinism(e);
  throw ConfigError("run.kind", "unknown experiment kind '" + k + "'");
}

inline void write_outputs(const RunResult& r, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& [name, t] : r.tables) t.write(dir / name);
  r.records.write(dir / "records.jsonl");
  JsonLines summary;
  for (const auto& c : r.criteria) summary.add(c.json());
  summary.write(dir / "summary.jsonl");
  r.timing.write(dir / "timing.jsonl");
}

inline std::string criterion_line(const CriterionResult& c) {
  std::ostringstream s;
  s << to_string(c.status) << "  ";
  if (c.id > 0) s << "[" << c.id << "] ";
  s << c.name << ": measured=" << fmt17(c.measured) << " threshold=" << fmt17(c.threshold);
  if (!c.detail.empty()) s << " (" << c.detail << ")";
  return s.str();
}

inline std::string error_json(const std::string& key, const std::string& message) {
  JsonRecord j;
  j.add("error", std::string("config")).add("key", key).add("message", message);
  return j.text();
}

/// Exit codes: 0 all hard checks pass, 1 any hard failure, 2 bad config.
inline int run(const std::string& config_path, std::ostream& out = std::cout, std::ostream& err = std::cerr,
               const std::string& output_override = "") {
  ExperimentConfig e;
  try {
    e = ExperimentConfig::from(Config::load(config_path));
    if (!output_override.empty()) e.output_dir = output_override;
  } catch (const ConfigError& ex) {
    err << error_json(ex.key(), ex.what()) << "\n";
    return 2;
  }
  RunResult r;
  try {
    r = execute(e);
  } catch (const ConfigError& ex) {
    err << error_json(ex.key(), ex.what()) << "\n";
    return 2;
  }
  write_outputs(r, e.output_dir);
  for (const auto& c : r.criteria) out << criterion_line(c) << "\n";
  return r.hard_failure() ? 1 : 0;
}

// report ---------------------------------------------------------------------

struct ReportSummary {
  std::vector<CriterionResult> rows;
  int pass = 0, fail = 0, report = 0, skipped = 0;
  std::string text;
};

namespace detail {

inline std::map<std::string, std::string> parse_flat_json(const std::string& line) {
  std::map<std::string, std::string> m;
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (!j.is_object()) return m;
  for (const auto& [k, v] : j.items()) {
    if (v.is_string()) m[k] = v.get<std::string>();
    else if (v.is_number()) m[k] = fmt17(v.get<double>());
    else m[k] = v.dump();
  }
  return m;
}

inline double to_num(const std::string& s) {
  if (s == "null" || s.empty()) return std::nan("");
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    return std::nan("");
  }
}

}  // namespace detail

/// Collects summary.jsonl from dir and its immediate subdirectories.
inline ReportSummary report_render(const fs::path& dir) {
  ReportSummary s;
  std::vector<fs::path> files;
  if (fs::exists(dir / "summary.jsonl")) files.push_back(dir / "summary.jsonl");
  if (fs::is_directory(dir))
    for (const auto& ent : fs::directory_iterator(dir))
      if (ent.is_directory() && fs::exists(ent.path() / "summary.jsonl")) files.push_back(ent.path() / "summary.jsonl");
  std::sort(files.begin(), files.end());
  std::vector<bool> seen(13, false);
  for (const auto& f : files) {
    std::ifstream in(f);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto m = detail::parse_flat_json(line);
      CriterionResult c;
      c.id = static_cast<int>(detail::to_num(m.count("criterion") ? m.at("criterion") : "0"));
      c.name = m.count("name") ? m.at("name") : "";
      c.measured = detail::to_num(m.count("measured") ? m.at("measured") : "");
      c.threshold = detail::to_num(m.count("threshold") ? m.at("threshold") : "");
      c.status = parse_status(m.count("status") ? m.at("status") : "");
      c.detail = m.count("detail") ? m.at("detail") : "";
      if (c.id >= 1 && c.id <= 12) seen[c.id] = true;
      s.rows.push_back(c);
    }
  }
  for (int id = 1; id <= 12; ++id)
    if (!seen[id]) s.rows.push_back({id, "no artifacts", std::nan(""), std::nan(""), Status::skipped, ""});
  std::ostringstream t;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-8s %-4s %-44s %-24s %-24s\n", "status", "id", "check", "measured", "threshold");
  t << buf;
  CsvTable csv("criterion,name,status,measured,threshold");
  for (const auto& c : s.rows) {
    switch (c.status) {
      case Status::pass: ++s.pass; break;
      case Status::fail: ++s.fail; break;
      case Status::report: ++s.report; break;
      case Status::skipped: ++s.skipped; break;
    }
    std::snprintf(buf, sizeof buf, "%-8s %-4s %-44s %-24s %-24s\n", to_string(c.status),
                  c.id ? std::to_string(c.id).c_str() : "-", c.name.substr(0, 44).c_str(), fmt17(c.measured).c_str(),
                  fmt17(c.threshold).c_str());
    t << buf;
    csv.row({static_cast<std::int64_t>(c.id), c.name, std::string(to_string(c.status)), c.measured, c.threshold});
  }
  t << "pass=" << s.pass << " fail=" << s.fail << " report=" << s.report << " skipped=" << s.skipped << "\n";
  s.text = t.str();
  if (fs::is_directory(dir)) csv.write(dir / "report.csv");
  return s;
}

// determinism ----------------------------------------------------------------

namespace detail {

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::vector<fs::path> deterministic_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& ent : fs::directory_iterator(dir)) {
    const auto name = ent.path().filename().string();
    if (name != "timing.jsonl") out.push_back(ent.path().filename());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Largest relative difference between numeric CSV cells; inf on a shape mismatch.
inline double csv_numeric_gap(const std::string& a, const std::string& b) {
  std::istringstream sa(a), sb(b);
  std::string la, lb;
  double worst = 0.0;
  while (true) {
    const bool ga = static_cast<bool>(std::getline(sa, la)), gb = static_cast<bool>(std::getline(sb, lb));
    if (ga != gb) return INFINITY;
    if (!ga) return worst;
    std::stringstream ca(la), cb(lb);
    std::string xa, xb;
    while (true) {
      const bool ha = static_cast<bool>(std::getline(ca, xa, ',')), hb = static_cast<bool>(std::getline(cb, xb, ','));
      if (ha != hb) return INFINITY;
      if (!ha) break;
      if (xa == xb) continue;
      const double va = to_num(xa), vb = to_num(xb);
      if (std::isnan(va) || std::isnan(vb)) return INFINITY;
      worst = std::max(worst, std::abs(va - vb) / std::max(std::abs(va), std::abs(vb)));
    }
  }
}

}  // namespace detail

inline RunResult run_determinism(const ExperimentConfig& e) {
  const auto& c = e.raw;
  std::vector<std::string> targets;
  {
    std::stringstream ss(c.str("determinism.targets"));
    std::string s;
    while (std::getline(ss, s, ','))
      if (!detail::trim(s).empty()) targets.push_back(detail::trim(s));
  }
  const double tol = c.num("determinism.tol", 1e-12);
  const int alt_workers = static_cast<int>(c.integer("determinism.workers", 2));
  const fs::path base = fs::path(c.origin()).parent_path();
  RunResult out;
  CsvTable t("target,file,bytes_identical,worker_gap");
  bool bytes_ok = true;
  double gap = 0.0;
  for (const auto& tgt : targets) {
    const fs::path p = fs::path(tgt).is_absolute() ? fs::path(tgt) : base / tgt;
    Config tc;
    try {
      tc = Config::load(p.string());
    } catch (const ConfigError& ex) {
      throw ConfigError("determinism.targets", ex.what());
    }
    if (tc.str("run.kind", "") == "determinism") throw ConfigError("determinism.targets", "nested determinism run");
    const std::string stem = p.stem().string();
    std::vector<fs::path> dirs;
    for (int pass = 0; pass < 3; ++pass) {
      auto ec = ExperimentConfig::from(tc);
      ec.workers = pass < 2 ? 1 : alt_workers;
      const fs::path d = fs::path(e.output_dir) / stem / (pass < 2 ? "w1_" + std::to_string(pass) : "w" + std::to_string(alt_workers));
      fs::remove_all(d);
      write_outputs(execute(ec), d);
      dirs.push_back(d);
    }
    const auto files = detail::deterministic_files(dirs[0]);
    for (const auto& f : files) {
      const auto a = detail::slurp(dirs[0] / f), b = detail::slurp(dirs[1] / f), w = detail::slurp(dirs[2] / f);
      const bool same = a == b;
      const double g = f.extension() == ".csv" ? detail::csv_numeric_gap(a, w) : (a == w ? 0.0 : INFINITY);
      bytes_ok = bytes_ok && same;
      gap = std::max(gap, g);
      t.row({stem, f.string(), same, g});
    }
  }
  out.tables.emplace("determinism.csv", t);
  out.criteria.push_back({12, "determinism: byte-identical reruns", bytes_ok ? 0.0 : 1.0, 0.0, verdict(bytes_ok),
                          std::to_string(targets.size()) + " target configs, workers=1 twice"});
  out.criteria.push_back({12, "determinism: worker-count gap", gap, tol, verdict(gap < tol),
                          "workers=" + std::to_string(alt_workers) + " against workers=1"});
  return out;
}

// selftest -------------------------------------------------------------------

/// Fast built-in checks at reduced sizes; returns 0 when all pass.
inline int selftest(std::ostream& out = std::cout) {
  const char* cases[] = {
      "[run]\nkind = delta-identity\n[delta]\nQ = 30\nm_max = 500\n",
      "[run]\nkind = hyperbola-identity\n[hyperbola]\nQ = 1000\n",
      "[run]\nkind = partition-unity\n[partition]\npoints = 500\n",
      "[run]\nkind = lemcon\n[lemcon]\nlimit = 120\n",
      "[run]\nkind = weil-bound\n[weil]\nq_max = 150\nsamples = 10\n",
      "[run]\nkind = voronoi-verify\n[voronoi]\nq_max = 4\n",
      "[run]\nkind = bessel-selftest\n[bessel]\npoints = 200\n",
  };
  bool ok = true;
  for (const char* text : cases) {
    auto e = ExperimentConfig::from(Config::from_string(text));
    e.workers = 1;
    const auto r = execute(e);
    for (auto c : r.criteria) {
      out << "selftest " << e.kind << ": " << criterion_line(c) << "\n";
      ok = ok && c.status != Status::fail;
    }
  }
  out << (ok ? "selftest PASS" : "selftest FAIL") << "\n";
  return ok ? 0 : 1;
}

}  // namespace sconv::harness
