#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cmh/coupling.hpp"
#include "cmh/mh_kernel.hpp"
#include "cmh/optimize.hpp"
#include "cmh/rates.hpp"
#include "cmh/targets.hpp"

namespace cmh::io {

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);
std::string format_vector(const Vector& v, char sep = ',');
double parse_double(std::string_view text);
Vector parse_vector(std::string_view text, char sep = ',');

// Header `y,x1,...,xd`; strict column count.
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(std::ostream& out, const Dataset& data);

// Plain numeric matrix, one row per line, no header.
Matrix read_matrix_csv(const std::filesystem::path& path);

// `step,beta_1,...,beta_d,accepted`
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace, Eigen::Index dim);

// `t,exact_w,lower_bound,asymptotic_bound`, blank where not applicable.
void write_rate_csv(std::ostream& out, const std::vector<RatePoint>& series);

// `t,mean_distance,stderr,fraction_coalesced,fraction_at_mode`
void write_coupling_csv(std::ostream& out, const std::vector<CouplingRow>& rows);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Flat `key=value` record, one pair per line, order preserved.
void write_key_values(std::ostream& out, const KeyValues& kv);
KeyValues read_key_values(std::istream& in);

KeyValues mode_record(const ModeResult& mode);
ModeResult parse_mode_record(const KeyValues& kv);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace cmh::io
