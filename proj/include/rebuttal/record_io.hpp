#pragma once

#include <string>

#include "rebuttal/json_util.hpp"
#include "rebuttal/types.hpp"

namespace rebuttal {

json to_json(const StageTrace& trace);
StageTrace stage_trace_from_json(const json& j);

json to_json(const RetrievalResult& result);
RetrievalResult retrieval_result_from_json(const json& j);

json to_json(const Comment& comment);
Comment comment_from_json(const json& j);

/// TsrRecord in its on-disk form. The profile uses the extractor field names
/// (global_profile, comment_analysis, ...).
json to_json(const TsrRecord& record);
TsrRecord tsr_record_from_json(const json& j);

/// Stable text form: two-space indent, sorted keys, trailing newline.
std::string dump_record(const TsrRecord& record);

/// Copy of `j` with every "timestamp" member removed, for replay comparisons.
json strip_timestamps(json j);

}  // namespace rebuttal
