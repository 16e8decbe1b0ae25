// Runs the shipped criterion configs and prints one PASS/FAIL line per criterion.
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sconv/harness/run.hpp"

namespace fs = std::filesystem;
using namespace sconv::harness;

int main(int argc, char** argv) {
  const fs::path configs = argc > 1 ? fs::path(argv[1]) : fs::path(SCONV_CONFIG_DIR);
  const fs::path out = argc > 2 ? fs::path(argv[2]) : fs::path("acceptance");
  std::map<int, fs::path> by_id;
  for (const auto& ent : fs::directory_iterator(configs)) {
    const auto name = ent.path().filename().string();
    if (name.rfind("criterion_", 0) == 0 && ent.path().extension() == ".cfg")
      by_id[std::stoi(name.substr(10, 2))] = ent.path();
  }
  bool all = true;
  for (int id = 1; id <= 12; ++id) {
    if (!by_id.count(id)) {
      std::cout << "FAIL  criterion " << id << ": no config shipped\n";
      all = false;
      continue;
    }
    std::ostringstream lines, err;
    const auto dir = out / by_id[id].stem();
    const int rc = run(by_id[id].string(), lines, err, dir.string());
    std::vector<CriterionResult> rows;
    std::ifstream in(dir / "summary.jsonl");
    std::string l;
    while (std::getline(in, l)) {
      const auto m = detail::parse_flat_json(l);
      CriterionResult c;
      c.id = std::stoi(m.at("criterion"));
      c.name = m.at("name");
      c.measured = detail::to_num(m.at("measured"));
      c.threshold = detail::to_num(m.at("threshold"));
      c.status = parse_status(m.at("status"));
      c.detail = m.at("detail");
      if (c.id == id) rows.push_back(c);
    }
    bool ok = rc == 0 && !rows.empty();
    bool advisory = true;
    std::string note;
    for (const auto& c : rows) {
      if (c.status == Status::fail) ok = false;
      // The report-only ratio check carries a documented threshold.
      if (id == 10 && c.status == Status::report) advisory = advisory && c.measured < c.threshold;
      note += (note.empty() ? "" : "; ") + c.name + " " + to_string(c.status) + " measured=" + fmt17(c.measured) +
              " threshold=" + fmt17(c.threshold);
    }
    if (rc == 2) note = "config error " + err.str();
    const bool pass = ok && advisory;
    all = all && pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << id << (id == 10 ? " (report-only)" : "") << ": "
              << note << "\n";
  }
  return all ? 0 : 1;
}
