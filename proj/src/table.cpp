#include "pottsgram/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pottsgram/csv.hpp"

namespace pottsgram {

namespace {

double parse_double(const std::string& field, const std::string& where) {
    if (field.empty()) return std::nan("");
    double value = 0.0;
    const auto* begin = field.data();
    const auto* end = begin + field.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end)
        throw SchemaError(where + ": cannot parse number '" + field + "'");
    return value;
}

std::uint64_t parse_u64(const std::string& field, const std::string& where) {
    std::uint64_t value = 0;
    const auto* begin = field.data();
    const auto* end = begin + field.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end)
        throw SchemaError(where + ": cannot parse integer '" + field + "'");
    return value;
}

}  // namespace

ObservableTable::ObservableTable(std::vector<ObservableRow> rows) {
    for (auto& row : rows) add(std::move(row));
}

void ObservableTable::check_duplicate(const ObservableRow& row) const {
    for (const auto& existing : rows_)
        if (existing.key() == row.key())
            throw SchemaError("duplicate observable key (K=" + std::to_string(row.K) +
                              ", kT=" + format_double(row.kT) +
                              ", N=" + std::to_string(row.N) + ")");
}

void ObservableTable::add(ObservableRow row) {
    check_duplicate(row);
    rows_.push_back(std::move(row));
}

void ObservableTable::sort_by_key() {
    std::sort(rows_.begin(), rows_.end(),
              [](const ObservableRow& a, const ObservableRow& b) { return a.key() < b.key(); });
}

ObservableTable ObservableTable::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open '" + path + "'");
    return from_stream(in, path);
}

ObservableTable ObservableTable::from_stream(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(origin + ": empty file");
    {
        const auto found = split_csv_line(line);
        const auto expected = split_csv_line(kObservablesHeader);
        if (found.size() != expected.size())
            throw SchemaError(origin + ": header has " + std::to_string(found.size()) +
                              " columns, expected " + std::to_string(expected.size()));
        for (std::size_t i = 0; i < expected.size(); ++i)
            if (found[i] != expected[i])
                throw SchemaError(origin + ": header column " + std::to_string(i + 1) +
                                  " is '" + found[i] + "', expected '" + expected[i] + "'");
    }

    ObservableTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string where = origin + ":" + std::to_string(line_no);
        if (fields.size() != 17)
            throw SchemaError(where + ": expected 17 fields, found " +
                              std::to_string(fields.size()));
        ObservableRow row;
        row.K = static_cast<int>(parse_u64(fields[0], where));
        row.J = parse_double(fields[1], where);
        row.q = parse_double(fields[2], where);
        row.t = parse_double(fields[3], where);
        row.epsilon = parse_double(fields[4], where);
        row.kT = parse_double(fields[5], where);
        row.N = static_cast<std::size_t>(parse_u64(fields[6], where));
        row.samples = static_cast<std::size_t>(parse_u64(fields[7], where));
        row.seed = parse_u64(fields[8], where);
        row.mean_M = parse_double(fields[9], where);
        row.se_M = parse_double(fields[10], where);
        row.chi = parse_double(fields[11], where);
        row.chi_tilde = parse_double(fields[12], where);
        row.binder = parse_double(fields[13], where);
        row.corr_Gtilde = parse_double(fields[14], where);
        row.mutual_info = parse_double(fields[15], where);
        row.error = fields[16];
        table.add(std::move(row));
    }
    return table;
}

void ObservableTable::write_csv(std::ostream& out) const {
    out << kObservablesHeader << '\n';
    for (const auto& r : rows_) {
        out << r.K << ',' << format_double(r.J) << ',' << format_double(r.q) << ','
            << format_double(r.t) << ',' << format_double(r.epsilon) << ','
            << format_double(r.kT) << ',' << r.N << ',' << r.samples << ',' << r.seed << ',';
        if (r.ok()) {
            out << format_double(r.mean_M) << ',' << format_double(r.se_M) << ','
                << format_double(r.chi) << ',' << format_double(r.chi_tilde) << ','
                << format_double(r.binder) << ',' << format_double(r.corr_Gtilde) << ','
                << format_double(r.mutual_info) << ',';
        } else {
            out << ",,,,,,,";
        }
        out << r.error << '\n';
    }
}

std::string ObservableTable::to_csv() const {
    std::ostringstream out;
    write_csv(out);
    return out.str();
}

}  // namespace pottsgram
