#include "bhsim/event_log.hpp"

#include "bhsim/rng.hpp"
#include "bhsim/scenario.hpp"

#include <array>

namespace bhsim {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 13> kKindNames{{
    {EventKind::Header, "header"},
    {EventKind::Partition, "partition"},
    {EventKind::Detection, "detection"},
    {EventKind::Track, "track"},
    {EventKind::Phase, "phase"},
    {EventKind::Claim, "claim"},
    {EventKind::Command, "command"},
    {EventKind::Pop, "pop"},
    {EventKind::Confirm, "confirm"},
    {EventKind::Failure, "failure"},
    {EventKind::Geofence, "geofence"},
    {EventKind::Diagnostic, "diagnostic"},
    {EventKind::End, "end"},
}};

}  // namespace

std::string_view to_string(EventKind k) {
    for (const auto& [kind, name] : kKindNames)
        if (kind == k) return name;
    return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
    for (const auto& [kind, name] : kKindNames)
        if (name == s) return kind;
    return std::nullopt;
}

std::string EventRecord::to_line() const {
    nlohmann::ordered_json j;
    j["seq"] = seq;
    j["t"] = time;
    j["agent"] = agent;
    j["kind"] = to_string(kind);
    j["data"] = data;
    return j.dump();
}

EventRecord EventRecord::parse(std::string_view line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("event", e.what());
    }
    if (!j.is_object() || j.size() != 5 || !j.contains("seq") || !j.contains("t") ||
        !j.contains("agent") || !j.contains("kind") || !j.contains("data"))
        throw ParseError("event", "record must have exactly seq, t, agent, kind, data");
    if (!j["seq"].is_number_unsigned() || !j["t"].is_number() || !j["agent"].is_number_integer() ||
        !j["kind"].is_string() || !j["data"].is_object())
        throw ParseError("event", "field of the wrong type");
    auto kind = parse_event_kind(j["kind"].get<std::string>());
    if (!kind) throw ParseError("event", "unknown kind '" + j["kind"].get<std::string>() + "'");

    EventRecord r;
    r.seq = j["seq"].get<std::uint64_t>();
    r.time = j["t"].get<double>();
    r.agent = j["agent"].get<int>();
    r.kind = *kind;
    r.data = j["data"];
    return r;
}

void EventLog::append(double time, int agent, EventKind kind, nlohmann::json data) {
    if (time < last_time_)
        throw InvariantViolation("event log time went backwards");
    last_time_ = time;
    EventRecord r{seq_++, time, agent, kind, std::move(data)};
    std::string line = r.to_line();
    line.push_back('\n');
    for (unsigned char c : line) {
        digest_ ^= c;
        digest_ *= 0x100000001b3ULL;
    }
    if (sink_) sink_->write(line.data(), static_cast<std::streamsize>(line.size()));
}

}  // namespace bhsim
