#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <tuple>
#include <vector>

#include "pottsgram/errors.hpp"

namespace pottsgram {

// One row of the observables table, keyed by the full parameter tuple.
struct ObservableRow {
    int K = 0;
    double J = 0.0;
    double q = 0.0;
    double t = 0.0;
    double epsilon = 0.0;
    double kT = 0.0;
    std::size_t N = 0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double mean_M = 0.0;
    double se_M = 0.0;
    double chi = 0.0;
    double chi_tilde = 0.0;
    double binder = 0.0;
    double corr_Gtilde = 0.0;
    double mutual_info = 0.0;
    std::string error;  // empty on success

    auto key() const { return std::make_tuple(K, J, q, t, epsilon, kT, N); }
    bool ok() const { return error.empty(); }
};

inline constexpr const char* kObservablesHeader =
    "K,J,q,t,epsilon,kT,N,samples,seed,mean_M,se_M,chi,chi_tilde,binder,corr_Gtilde,"
    "mutual_info,error";

class ObservableTable {
public:
    ObservableTable() = default;
    explicit ObservableTable(std::vector<ObservableRow> rows);

    static ObservableTable from_csv(const std::string& path);
    static ObservableTable from_stream(std::istream& in, const std::string& origin);

    void add(ObservableRow row);          // rejects duplicate keys
    void sort_by_key();                   // canonical order for emission
    const std::vector<ObservableRow>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

    void write_csv(std::ostream& out) const;
    std::string to_csv() const;

private:
    void check_duplicate(const ObservableRow& row) const;
    std::vector<ObservableRow> rows_;
};

}  // namespace pottsgram
