#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "elastcert/energy.hpp"

namespace elastcert::testing {

struct NamedModel {
  std::string label;
  std::shared_ptr<EnergyModel> model;
  bool convex_in_c;  // known analytically, used to cross-check scan verdicts
};

/// The model suite the consistency properties quantify over. Convexity flags:
/// quad_log / trace_log / neo_hooke have positive-semidefinite C-Hessians by
/// inspection of their building blocks, svk is convex iff 3 lambda + 2 mu > 0,
/// det C and tr sqrt(C) are classical non-convex cases.
inline std::vector<NamedModel> suite_models() {
  std::vector<NamedModel> suite;
  suite.push_back({"quad_log(1/12,1/4)",
                   std::make_shared<QuadLogModel>(1.0 / 12.0, 1.0 / 4.0), true});
  suite.push_back({"trace_log(1/2,1/4)",
                   std::make_shared<TraceLogModel>(0.5, 0.25), true});
  suite.push_back({"neo_hooke(1,1/4,-1/2)",
                   std::make_shared<NeoHookeModel>(1.0, 0.25, -0.5), true});
  suite.push_back({"svk(1,1)",
                   std::make_shared<SaintVenantKirchhoffModel>(1.0, 1.0), true});
  suite.push_back({"svk(1,-1)",
                   std::make_shared<SaintVenantKirchhoffModel>(1.0, -1.0), false});
  suite.push_back({"neg_log_det",
                   std::make_shared<DetFunctionModel>(neg_log_function()), true});
  suite.push_back({"det",
                   std::make_shared<DetFunctionModel>(power_function(1.0)), false});
  suite.push_back({"valanis_landel(t^2,-log)",
                   std::make_shared<ValanisLandelModel>(power_function(2.0),
                                                        neg_log_function()),
                   true});
  suite.push_back({"valanis_landel(sqrt)",
                   std::make_shared<ValanisLandelModel>(power_function(0.5)), false});
  return suite;
}

/// Log-det members only (the families that blow up under compression).
inline std::vector<NamedModel> log_det_models() {
  std::vector<NamedModel> out;
  for (auto& nm : suite_models()) {
    if (nm.label.find("log") != std::string::npos) out.push_back(nm);
  }
  return out;
}

}  // namespace elastcert::testing
