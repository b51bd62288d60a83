#include "mgspec/io.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "mgspec/errors.hpp"

namespace mgspec {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

namespace {

std::string int_list(const RealVector& v) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_number(v(i));
    }
    return out + "]";
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::string spectrum_csv(const SpectrumResult& result) {
    std::string out = "lambda,multiplicity,residual\n";
    for (const auto& line : result.eigenvalues)
        out += format_number(line.lambda) + "," + std::to_string(line.multiplicity) + "," +
               format_number(line.residual) + "\n";
    return out;
}

std::string branches_csv(const BranchTable& table) {
    std::string out = "branch_id,epsilon,lambda\n";
    for (const Branch& b : table.branches)
        for (const BranchSample& s : b.samples)
            out += std::to_string(b.id) + "," + format_number(s.epsilon) + "," +
                   format_number(s.lambda) + "\n";
    return out;
}

std::string branch_summary_csv(const BranchTable& table) {
    std::string out = "branch_id,class,alpha,coefficient,limit\n";
    for (const Branch& b : table.branches) {
        out += std::to_string(b.id);
        out += ",";
        out += branch_class_name(b.cls);
        const bool power_law = b.cls == BranchClass::Fast || b.cls == BranchClass::SlowNegative ||
                               b.cls == BranchClass::SlowPositive;
        out += ",";
        if (power_law) out += format_number(b.alpha);
        out += ",";
        if (power_law) out += format_number(b.coefficient);
        out += ",";
        if (b.cls == BranchClass::Exotic) out += format_number(b.limit);
        out += "\n";
    }
    return out;
}

std::string prediction_json(const Prediction& p) {
    std::string out = "{\n";
    out += "  \"m0\": " + std::to_string(p.m0) + ",\n";
    out += "  \"n_minus\": " + std::to_string(p.n_minus) + ",\n";
    out += "  \"n_zero\": " + std::to_string(p.n_zero) + ",\n";
    out += "  \"n_plus\": " + std::to_string(p.n_plus) + ",\n";
    out += "  \"slow_slopes\": " + int_list(p.slow_slopes) + ",\n";
    out += "  \"fast_coefficients\": " + int_list(p.fast_coefficients) + "\n";
    out += "}\n";
    return out;
}

std::string verify_json(const VerifyReport& report, const BranchTable& table) {
    std::string out = "{\n";
    out += std::string("  \"pass\": ") + (report.pass ? "true" : "false") + ",\n";
    out += "  \"observed\": {\"fast\": " + std::to_string(report.observed_fast) +
           ", \"slow_negative\": " + std::to_string(report.observed_slow_negative) +
           ", \"exotic\": " + std::to_string(report.observed_exotic) +
           ", \"slow_positive\": " + std::to_string(report.observed_slow_positive) +
           ", \"unclassified\": " + std::to_string(report.observed_unclassified) + "},\n";
    out += "  \"checks\": [\n";
    for (size_t i = 0; i < report.items.size(); ++i) {
        const VerifyItem& it = report.items[i];
        out += "    {\"check\": \"" + escape(it.check) + "\", \"pass\": " +
               (it.pass ? "true" : "false") + ", \"detail\": \"" + escape(it.detail) + "\"}";
        out += (i + 1 < report.items.size()) ? ",\n" : "\n";
    }
    out += "  ],\n";
    out += "  \"warnings\": [\n";
    for (size_t i = 0; i < table.warnings.size(); ++i) {
        out += "    \"" + escape(table.warnings[i]) + "\"";
        out += (i + 1 < table.warnings.size()) ? ",\n" : "\n";
    }
    out += "  ]\n}\n";
    return out;
}

std::string nrc_json(const NrcReport& report) {
    std::string out = "{\n";
    out += "  \"nrc_dimension\": " + std::to_string(report.nrc_dim) + ",\n";
    out += "  \"form_nullity\": " + std::to_string(report.form_nullity) + ",\n";
    out += "  \"m0\": " + std::to_string(report.m0) + ",\n";
    out += std::string("  \"match\": ") + (report.match ? "true" : "false") + ",\n";
    out += "  \"angle_margin\": " + format_number(report.angle_margin) + ",\n";
    out += "  \"inertia_margin\": " + format_number(report.inertia_margin) + "\n";
    out += "}\n";
    return out;
}

std::string defects_json(const ConditionDefects& defects, bool valid) {
    std::string out = "{\n";
    out += std::string("  \"valid\": ") + (valid ? "true" : "false") + ",\n";
    out += "  \"idempotency\": " + format_number(defects.idempotency) + ",\n";
    out += "  \"hermiticity\": " + format_number(defects.hermiticity) + ",\n";
    out += "  \"completeness\": " + format_number(defects.completeness) + ",\n";
    out += "  \"mutual_orthogonality\": " + format_number(defects.mutual_orth) + ",\n";
    out += "  \"lambda_margin\": " + format_number(defects.lambda_margin) + ",\n";
    out += "  \"lambda_discarded\": " + format_number(defects.lambda_discarded) + "\n";
    out += "}\n";
    return out;
}

SpectrumResult parse_spectrum_csv(const std::string& text) {
    SpectrumResult result;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "lambda,multiplicity,residual")
        throw ConfigError("bad spectrum CSV header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        EigenvalueLine e;
        char* end = nullptr;
        e.lambda = std::strtod(line.c_str(), &end);
        if (*end != ',') throw ConfigError("bad spectrum CSV row: " + line);
        e.multiplicity = static_cast<int>(std::strtol(end + 1, &end, 10));
        if (*end != ',') throw ConfigError("bad spectrum CSV row: " + line);
        e.residual = std::strtod(end + 1, &end);
        result.eigenvalues.push_back(e);
    }
    return result;
}

Prediction parse_prediction_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("bad prediction JSON: ") + e.what());
    }
    Prediction p;
    p.m0 = doc.at("m0").get<int>();
    p.n_minus = doc.at("n_minus").get<int>();
    p.n_zero = doc.at("n_zero").get<int>();
    p.n_plus = doc.at("n_plus").get<int>();
    const auto slopes = doc.at("slow_slopes").get<std::vector<double>>();
    const auto fast = doc.at("fast_coefficients").get<std::vector<double>>();
    p.slow_slopes = Eigen::Map<const RealVector>(slopes.data(), slopes.size());
    p.fast_coefficients = Eigen::Map<const RealVector>(fast.data(), fast.size());
    return p;
}

}  // namespace mgspec
