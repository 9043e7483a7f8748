#ifndef FLMCP_STATISTIC_KIND_HPP_
#define FLMCP_STATISTIC_KIND_HPP_

#include <string>

namespace flmcp {

/// Functional of the sequential process used as test statistic:
/// KS       sup_t sup_z |G_n(t,z)|
/// CvMSup   sup_t of the per-t Cramer-von-Mises average
/// CvMInt   integral over t of the per-t Cramer-von-Mises average
enum class StatisticKind { KS = 0, CvMSup = 1, CvMInt = 2 };

std::string to_string(StatisticKind kind);
StatisticKind statistic_kind_from_string(const std::string& name);

}  // namespace flmcp

#endif  // FLMCP_STATISTIC_KIND_HPP_
