#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "weightdyn/dataset.hpp"
#include "weightdyn/ensemble.hpp"
#include "weightdyn/roc.hpp"
#include "weightdyn/train.hpp"

namespace wdyn {

// Shortest round-trip representation; identical input bits give identical
// text, which is what makes rerun outputs byte-comparable.
std::string format_double(double v);

void write_dataset_csv(const Dataset& d, const std::filesystem::path& path);
Dataset read_dataset_csv(const std::filesystem::path& path);

nlohmann::json run_record_to_json(const RunRecord& rec);
void write_run_record_json(const RunRecord& rec, const std::filesystem::path& path);

void write_outcome_csv(const OutcomeTable& table, const std::filesystem::path& path);
OutcomeTable read_outcome_csv(const std::filesystem::path& path);

// Scatter of whole-run exponents against final loss, one row per (run, q).
void write_le_vs_cf_csv(const EnsembleResult& result, const std::filesystem::path& path);

void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path);

nlohmann::json ensemble_config_to_json(const EnsembleConfig& cfg);
// Starts from defaults, applies present keys, rejects unknown ones.
EnsembleConfig ensemble_config_from_json(const nlohmann::json& j);
EnsembleConfig load_ensemble_config(const std::filesystem::path& path);

}  // namespace wdyn
