#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wandrelay {

// Error names travel verbatim on the wire (ERROR frames) and in CLI output.
enum class Errc {
    UnknownContent,
    VoiceNoteTooLong,
    RadiusOutOfRange,
    InvalidWindow,
    EmptySchedule,
    UnknownMarker,
    ScaleOutOfRange,
    InvalidCoordinate,
    InvalidPrincipal,
    OutOfOrderSample,
    UnknownRecipient,
    DuplicateMessageId,
    NoSession,
    UnknownMessage,
    NotDelivered,
    AlreadyReacted,
    DuplicateSession,
    SessionClosed,
    PastDeadline,
    NotAwaitingConsent,
    IllegalTransition,
    ParseError,
    IncompleteLog,
    EmptyInput,
    ProtocolError,
    AddressInUse,
    DataDirUnwritable,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
          code_(code), detail_(detail) {}

    Errc code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    Errc code_;
    std::string detail_;
};

}  // namespace wandrelay
