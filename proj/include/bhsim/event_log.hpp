#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace bhsim {

inline constexpr std::string_view kEventSchema = "bhsim.events/1";

enum class EventKind {
    Header,
    Partition,
    Detection,
    Track,
    Phase,
    Claim,
    Command,
    Pop,
    Confirm,
    Failure,
    Geofence,
    Diagnostic,
    End,
};

std::string_view to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view s);

/// One JSON-lines record:
///   {"seq":N,"t":T,"agent":A,"kind":"...","data":{...}}
/// `agent` is -1 for world- and fleet-level records.
struct EventRecord {
    std::uint64_t seq = 0;
    double time = 0.0;
    int agent = -1;
    EventKind kind = EventKind::Header;
    nlohmann::json data = nlohmann::json::object();

    std::string to_line() const;
    /// Throws ParseError (key "event") on malformed input.
    static EventRecord parse(std::string_view line);

    bool operator==(const EventRecord&) const = default;
};

/// Append-only, time-ordered event log. Every line goes into a running
/// FNV-1a digest; the optional sink receives the bytes as written.
class EventLog {
public:
    explicit EventLog(std::ostream* sink = nullptr) : sink_(sink) {}

    void append(double time, int agent, EventKind kind, nlohmann::json data);

    std::uint64_t digest() const { return digest_; }
    std::uint64_t count() const { return seq_; }

private:
    std::ostream* sink_;
    std::uint64_t seq_ = 0;
    std::uint64_t digest_ = 0xcbf29ce484222325ULL;
    double last_time_ = -1.0;
};

}  // namespace bhsim
