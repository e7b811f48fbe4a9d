#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ghznet::harness {

enum class OutputFormat : int { Csv = 0, JsonLines = 1 };

struct ResultRow {
    std::string pattern;
    double n_plus = 0.0;
    double n_minus = 0.0;
    double n_inconclusive = 0.0;
    std::optional<double> q_z;
    std::optional<double> q_x;
    std::optional<double> stderr_qz;
    std::optional<double> stderr_qx;
};

struct ResultTable {
    std::string run_id;
    std::string mode;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<ResultRow> rows;
};

/// Numbers with 12 significant digits, locale independent.
std::string format_number(double value);

/// Fixed column set:
/// run_id,mode,pattern,n_plus,n_minus,n_inconclusive,q_z,q_x,stderr_qz,stderr_qx,seed,config_hash
std::string to_csv(const ResultTable& table);
std::string to_jsonl(const ResultTable& table);

/// Writes the table; I/O failures carry the path in the message.
void emit(const ResultTable& table, OutputFormat format, const std::string& path);

} // namespace ghznet::harness
