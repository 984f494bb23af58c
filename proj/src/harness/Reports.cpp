//===-- Reports.cpp - JSON serialization of reports -----------------------===//

#include "mse/Harness.h"

#include <json.hpp>

namespace mse {

namespace {

using nlohmann::json;

json crashJson(const CrashReport &c) {
  return {{"kind", std::string(crashKindName(c.kind))},
          {"loc", c.site.str()},
          {"lines", c.site.lines},
          {"origin", c.site.originLocation()},
          {"input_hex", c.inputHex()},
          {"classification", std::string(classificationName(c.classification))}};
}

json dseJson(const DseReport &r) {
  json crashes = json::array();
  for (const CrashReport &c : r.crashes)
    crashes.push_back(crashJson(c));
  return {{"mode", r.mode},
          {"time_ms", r.timeMs},
          {"paths", r.paths},
          {"exits", r.exits},
          {"merged_away", r.mergedAway},
          {"queries", r.queries},
          {"cache_hits", r.cacheHits},
          {"avg_query_size", r.avgQuerySize},
          {"crashes", crashes},
          {"covered_lines", r.coveredLines},
          {"termination", std::string(terminationName(r.termination))},
          {"queries_by_location", r.queriesByLocation}};
}

json transformJson(const TransformReport &r) {
  json merges = json::array();
  for (const MergeRecord &m : r.merges)
    merges.push_back({{"location", m.location},
                      {"selects", m.selects},
                      {"dead_inserted", m.deadInserted}});
  json rejected = json::array();
  for (const Rejection &x : r.rejected)
    rejected.push_back({{"location", x.location},
                        {"reason", std::string(rejectReasonName(x.reason))},
                        {"detail", x.detail}});
  return {{"found", r.found},
          {"merged", r.merged()},
          {"rejected_count", r.rejected.size()},
          {"merges", merges},
          {"rejected", rejected}};
}

} // namespace

std::string dseReportJson(const DseReport &r, int indent) {
  return dseJson(r).dump(indent);
}

std::string transformReportJson(const TransformReport &r, int indent) {
  return transformJson(r).dump(indent);
}

std::string factsJson(const SymFacts &facts, int indent) {
  json out = json::object();
  for (const auto &[fn, ff] : facts.functions) {
    json branches = json::array();
    for (const InstRef &b : ff.symbolicBranches)
      branches.push_back(b.str());
    out[fn] = {{"symbolic_values", ff.symbolicValues},
               {"symbolic_branches", branches}};
  }
  return out.dump(indent);
}

std::string driverStateJson(const DriverState &d, int indent) {
  json history = json::array();
  for (const DriverIteration &it : d.history)
    history.push_back({{"constraints", it.constraints},
                       {"transform", transformJson(it.transform)},
                       {"true_positives", it.truePositives},
                       {"false_positives", it.falsePositives},
                       {"added_locations", it.addedLocations},
                       {"report", dseJson(it.report)}});
  json tps = json::array();
  for (const CrashReport &c : d.truePositives)
    tps.push_back(crashJson(c));
  return json{{"iterations", d.iterations},
              {"constraints", d.constraints},
              {"false_positive_locations", d.falsePositiveLocations},
              {"true_positives", tps},
              {"budget_exhausted", d.budgetExhausted},
              {"final", dseJson(d.finalReport)},
              {"history", history}}
      .dump(indent);
}

std::string compareJson(const CompareMatrix &m, int indent) {
  json cells = json::array();
  for (const CompareCell &c : m.cells) {
    json cell = {{"benchmark", c.benchmark},
                 {"size", c.size},
                 {"mode", std::string(modeName(c.mode))}};
    if (c.skipped)
      cell["status"] = "skipped";
    else if (!c.error.empty()) {
      cell["status"] = "error";
      cell["error"] = c.error;
    } else {
      cell["status"] = c.outOfTime ? "OOT" : "ok";
      cell["report"] = dseJson(c.report);
    }
    cells.push_back(cell);
  }
  return json{{"cells", cells}}.dump(indent);
}

} // namespace mse
