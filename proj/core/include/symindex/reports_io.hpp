#pragma once

#include <string>
#include <vector>

#include "symindex/indices.hpp"
#include "symindex/paths.hpp"
#include "symindex/symbol_model.hpp"
#include "symindex/verify.hpp"
#include "symindex/version.hpp"

namespace symindex {

// Provenance stamped onto every emitted row and document.
struct RunStamp {
  std::string config_hash;
  std::string version = kVersion;
};

struct SymbolRow {
  Vec x;
  Vec xi;
  SymbolValue value{};
  double abs_err = 0.0;
};

// Shortest decimal that parses back to exactly v.
std::string format_double(double v);

// RFC 4180 field quoting (quotes doubled, field wrapped when it holds a comma,
// quote or line break). Lines end in LF.
std::string csv_field(const std::string& raw);

std::string symbol_table_csv(const std::vector<SymbolRow>& rows, const RunStamp& st);
std::string empirical_symbol_csv(const std::vector<SymbolEstimate>& rows,
                                 const RunStamp& st);
std::string ensemble_csv(const PathEnsemble& ens, const RunStamp& st);
std::string bound_report_csv(const BoundCheckReport& rep, const RunStamp& st);
std::string lower_report_csv(const LowerBoundReport& rep, const RunStamp& st);
std::string scaling_report_csv(const ScalingReport& rep, const RunStamp& st);

std::string index_report_json(const IndexReport& rep, const RunStamp& st);
std::string bound_report_json(const BoundCheckReport& rep, const RunStamp& st);
std::string lower_report_json(const LowerBoundReport& rep, const RunStamp& st);
std::string scaling_report_json(const ScalingReport& rep, const RunStamp& st);

// Writes content verbatim; throws ValidationError naming the path on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace symindex
