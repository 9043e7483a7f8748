#include "flmcp/statistic_kind.hpp"

#include "flmcp/errors.hpp"

namespace flmcp {

std::string to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::KS: return "ks";
    case StatisticKind::CvMSup: return "cvm-sup";
    case StatisticKind::CvMInt: return "cvm-int";
  }
  throw ConfigError("unknown statistic kind");
}

StatisticKind statistic_kind_from_string(const std::string& name) {
  if (name == "ks") return StatisticKind::KS;
  if (name == "cvm-sup") return StatisticKind::CvMSup;
  if (name == "cvm-int") return StatisticKind::CvMInt;
  throw ConfigError("unknown statistic kind: '" + name +
                    "' (expected ks, cvm-sup or cvm-int)");
}

}  // namespace flmcp
