#include "ghznet/harness/table.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ghznet::harness {

std::string format_number(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 12);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

namespace {

std::string opt_field(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string{};
}

nlohmann::json opt_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

} // namespace

std::string to_csv(const ResultTable& table) {
    std::string out =
        "run_id,mode,pattern,n_plus,n_minus,n_inconclusive,q_z,q_x,stderr_qz,stderr_qx,seed,config_hash\n";
    for (const auto& row : table.rows) {
        out += table.run_id;
        out += ',';
        out += table.mode;
        out += ',';
        out += row.pattern;
        out += ',';
        out += format_number(row.n_plus);
        out += ',';
        out += format_number(row.n_minus);
        out += ',';
        out += format_number(row.n_inconclusive);
        out += ',';
        out += opt_field(row.q_z);
        out += ',';
        out += opt_field(row.q_x);
        out += ',';
        out += opt_field(row.stderr_qz);
        out += ',';
        out += opt_field(row.stderr_qx);
        out += ',';
        out += std::to_string(table.seed);
        out += ',';
        out += table.config_hash;
        out += '\n';
    }
    return out;
}

std::string to_jsonl(const ResultTable& table) {
    std::string out;
    for (const auto& row : table.rows) {
        nlohmann::json j{
            {"run_id", table.run_id},
            {"mode", table.mode},
            {"pattern", row.pattern},
            {"n_plus", row.n_plus},
            {"n_minus", row.n_minus},
            {"n_inconclusive", row.n_inconclusive},
            {"q_z", opt_json(row.q_z)},
            {"q_x", opt_json(row.q_x)},
            {"stderr_qz", opt_json(row.stderr_qz)},
            {"stderr_qx", opt_json(row.stderr_qx)},
            {"seed", table.seed},
            {"config_hash", table.config_hash},
        };
        out += j.dump();
        out += '\n';
    }
    return out;
}

void emit(const ResultTable& table, OutputFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << (format == OutputFormat::Csv ? to_csv(table) : to_jsonl(table));
    if (!out) throw std::runtime_error("write failed for output file '" + path + "'");
}

} // namespace ghznet::harness
