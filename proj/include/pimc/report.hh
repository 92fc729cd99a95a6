/*
 * report.hh
 *
 * JSON reports for check runs: per-subformula sub/super summaries,
 * certificates and the error ledger. Field order is fixed so identical
 * runs serialize to identical bytes.
 */

#ifndef PIMC_REPORT_HH_
#define PIMC_REPORT_HH_

#include <string>

#include <json.hpp>

#include "pimc/checker.hh"

namespace pimc {

using OrderedJson = nlohmann::ordered_json;

inline OrderedJson to_json(const Certificate& c) {
  OrderedJson j;
  j["m"] = c.m;
  j["rho"] = c.rho;
  j["horizon"] = c.horizon;
  j["tail"] = c.tail;
  j["status"] = c.certified() ? "Certified" : "Unknown";
  return j;
}

inline OrderedJson to_json(const ErrorLedger& l) {
  OrderedJson j;
  j["discretization"] = l.discretization;
  j["tail"] = l.tail;
  j["excision"] = l.excision;
  j["total"] = l.total;
  return j;
}

inline OrderedJson to_json(const AbsorbingReport& r) {
  OrderedJson j;
  j["verdict"] = to_string(r.verdict);
  j["las_cells"] = r.las.states();
  j["iterations"] = r.iterations;
  j["delta"] = r.delta_used;
  return j;
}

inline const char* to_string(EvalStatus s) {
  switch (s) {
    case EvalStatus::Exact: return "Exact";
    case EvalStatus::Certified: return "Certified";
    default: return "Inconclusive";
  }
}

inline OrderedJson report_json(const std::string& formula_text, double delta,
                               const VerifyResult& result, bool emit_masks) {
  OrderedJson j;
  j["formula"] = formula_text;
  j["delta"] = delta;
  j["status"] = result.inconclusive() ? "Inconclusive" : "Complete";
  OrderedJson subs = OrderedJson::array();
  for (const auto& n : result.nodes) {
    OrderedJson e;
    e["formula"] = n.text;
    e["status"] = to_string(n.status);
    e["sub_count"] = n.sets.sub.count();
    e["super_count"] = n.sets.super.count();
    if (emit_masks) {
      e["sub"] = n.sets.sub.states();
      e["super"] = n.sets.super.states();
    }
    if (!n.note.empty()) e["note"] = n.note;
    if (n.cert) e["certificate"] = to_json(*n.cert);
    if (n.ledger) e["ledger"] = to_json(*n.ledger);
    if (n.absorbing) e["absorbing"] = to_json(*n.absorbing);
    subs.push_back(e);
  }
  j["subformulas"] = subs;
  return j;
}

}  // namespace pimc

#endif  // PIMC_REPORT_HH_
