#pragma once

// Schema-versioned JSON for trained models and evaluation reports.

#include <string_view>

#include <nlohmann/json.hpp>

#include "rtheta/classify/evaluate.hpp"
#include "rtheta/classify/multilabel.hpp"

namespace rtheta::classify {

inline constexpr std::string_view kModelSchema = "rtheta-model/1";
inline constexpr std::string_view kReportSchema = "rtheta-report/1";

nlohmann::ordered_json to_json(const BinaryClassifier& model);
BinaryClassifier binary_classifier_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const MultiLabelModel& model);
MultiLabelModel multilabel_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::ordered_json& j);

}  // namespace rtheta::classify
