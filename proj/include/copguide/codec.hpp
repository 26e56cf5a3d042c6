#pragma once

// JSON forms of the core records, shared by the session log and the bus.
// Field names are fixed by docs/schema.md.

#include "json.hpp"

#include "copguide/feedback.hpp"
#include "copguide/guidance.hpp"

namespace copguide::gateway {

using nlohmann::json;

json to_json(const CoPSample& s);
json to_json(const feedback::FeedbackCommand& cmd);
json to_json(const guidance::GuidanceEvent& e);
/// Trial summary without the path (the path is the sample lines).
json to_json(const guidance::TrialRecord& r);

// Parsers throw Error(kSchemaViolation) on missing or mistyped fields.
CoPSample sample_from_json(const json& j);
feedback::FeedbackCommand command_from_json(const json& j);
guidance::GuidanceEvent event_from_json(const json& j);
guidance::TrialRecord trial_from_json(const json& j);

}  // namespace copguide::gateway
