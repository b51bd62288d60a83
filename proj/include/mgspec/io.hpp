#pragma once

#include <string>

#include "mgspec/asymptotics.hpp"
#include "mgspec/secular.hpp"
#include "mgspec/subspace.hpp"

namespace mgspec {

/// All numeric output is formatted with 15 significant digits, so repeated
/// runs are byte-identical.
std::string format_number(double v);

std::string spectrum_csv(const SpectrumResult& result);
std::string branches_csv(const BranchTable& table);
std::string branch_summary_csv(const BranchTable& table);
std::string prediction_json(const Prediction& p);
std::string verify_json(const VerifyReport& report, const BranchTable& table);
std::string nrc_json(const NrcReport& report);
std::string defects_json(const ConditionDefects& defects, bool valid);

/// Re-parse helpers used by round-trip tests.
SpectrumResult parse_spectrum_csv(const std::string& text);
Prediction parse_prediction_json(const std::string& text);

}  // namespace mgspec
