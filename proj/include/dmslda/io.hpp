#pragma once

#include <string>

#include "dmslda/classifier.hpp"
#include "dmslda/csl/wire.hpp"
#include "dmslda/types.hpp"

namespace dmslda {

/// Headerless CSV, d feature columns then a 1-based integer label
/// column. Floats are written with 17 significant digits so round trips
/// are bit-exact.
LabeledDataset load_labeled_csv(const std::string& path);
void save_labeled_csv(const LabeledDataset& data, const std::string& path);

/// Raw numeric CSV as a matrix (used for prediction inputs, where the
/// label column is optional).
Matrix load_csv_matrix(const std::string& path);

/// Model files are a FinalModel wire message written verbatim to disk.
void save_model(const ReducedLdaModel& model, int chosen_round, const std::string& path);
ReducedLdaModel load_model(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace dmslda
