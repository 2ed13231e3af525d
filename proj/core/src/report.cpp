#include "dlimp/report.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "dlimp/printer.hpp"

namespace dlimp {

const char* overall_status_name(OverallStatus status) {
  switch (status) {
    case OverallStatus::Pass: return "pass";
    case OverallStatus::Fail: return "fail";
    case OverallStatus::Unknown: return "unknown";
  }
  return "?";
}

void RunReport::finalize() {
  std::sort(symbols.begin(), symbols.end(),
            [](const SymbolReport& a, const SymbolReport& b) { return a.name < b.name; });
  std::sort(facts.begin(), facts.end(),
            [](const Fact& a, const Fact& b) { return a.name < b.name; });
  std::sort(checks.begin(), checks.end(),
            [](const CheckReport& a, const CheckReport& b) { return a.name < b.name; });

  bool any_fail = false;
  bool any_unknown = false;
  for (const Fact& fact : facts) {
    if (fact.verdict == Verdict::Fail) any_fail = true;
    if (fact.verdict == Verdict::Unknown) any_unknown = true;
    if (fact.assumed) tainted = true;
  }
  for (const CheckReport& check : checks) {
    if (check.verdict == Verdict::Fail) any_fail = true;
    if (check.verdict == Verdict::Unknown) any_unknown = true;
  }
  for (const SymbolReport& symbol : symbols) {
    if (symbol.tainted) tainted = true;
  }
  overall = any_fail      ? OverallStatus::Fail
            : any_unknown ? OverallStatus::Unknown
                          : OverallStatus::Pass;
}

std::string RunReport::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "model: " << model_path << "\n";
  out << "config: seed=" << seed << " tol=" << tolerance << " horizon=" << horizon
      << " runs=" << runs << " assume-existence=" << (assume_existence ? "yes" : "no")
      << "\n";
  for (const SymbolReport& s : symbols) {
    out << "symbol: " << s.name;
    if (!s.family.empty()) out << " family=" << s.family;
    out << " certificate=" << s.certificate;
    if (!s.evidence.empty()) out << " evidence=\"" << s.evidence << "\"";
    out << " tainted=" << (s.tainted ? "yes" : "no") << "\n";
  }
  for (const Fact& f : facts) {
    out << "fact: " << f.name << " kind=" << fact_kind_name(f.kind)
        << " statement=" << print(f.statement) << " verdict=" << verdict_name(f.verdict)
        << " assumed=" << (f.assumed ? "yes" : "no");
    if (!f.detail.empty()) out << " detail=\"" << f.detail << "\"";
    out << "\n";
  }
  for (const CheckReport& c : checks) {
    out << "check: " << c.name << " kind=" << c.kind
        << " verdict=" << verdict_name(c.verdict) << " runs=" << c.runs;
    if (c.first_violation) out << " first_violation=" << *c.first_violation;
    if (!c.detail.empty()) out << " detail=\"" << c.detail << "\"";
    out << "\n";
  }
  out << "tainted: " << (tainted ? "yes" : "no") << "\n";
  out << "overall: " << overall_status_name(overall) << "\n";
  return out.str();
}

std::string RunReport::to_json() const {
  nlohmann::json j;
  j["model"] = model_path;
  j["config"] = {{"seed", seed},
                 {"tol", tolerance},
                 {"horizon", horizon},
                 {"runs", runs},
                 {"assume_existence", assume_existence}};
  j["symbols"] = nlohmann::json::array();
  for (const SymbolReport& s : symbols) {
    j["symbols"].push_back({{"name", s.name},
                            {"family", s.family},
                            {"certificate", s.certificate},
                            {"evidence", s.evidence},
                            {"tainted", s.tainted}});
  }
  j["facts"] = nlohmann::json::array();
  for (const Fact& f : facts) {
    j["facts"].push_back({{"name", f.name},
                          {"kind", fact_kind_name(f.kind)},
                          {"statement", print(f.statement)},
                          {"verdict", verdict_name(f.verdict)},
                          {"assumed", f.assumed},
                          {"detail", f.detail}});
  }
  j["checks"] = nlohmann::json::array();
  for (const CheckReport& c : checks) {
    nlohmann::json check = {{"name", c.name},
                            {"kind", c.kind},
                            {"verdict", verdict_name(c.verdict)},
                            {"runs", c.runs},
                            {"detail", c.detail}};
    if (c.first_violation) check["first_violation"] = *c.first_violation;
    j["checks"].push_back(std::move(check));
  }
  j["tainted"] = tainted;
  j["overall"] = overall_status_name(overall);
  return j.dump(2) + "\n";
}

}  // namespace dlimp
