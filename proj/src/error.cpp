#include "wandrelay/error.hpp"

namespace wandrelay {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::UnknownContent: return "UnknownContent";
        case Errc::VoiceNoteTooLong: return "VoiceNoteTooLong";
        case Errc::RadiusOutOfRange: return "RadiusOutOfRange";
        case Errc::InvalidWindow: return "InvalidWindow";
        case Errc::EmptySchedule: return "EmptySchedule";
        case Errc::UnknownMarker: return "UnknownMarker";
        case Errc::ScaleOutOfRange: return "ScaleOutOfRange";
        case Errc::InvalidCoordinate: return "InvalidCoordinate";
        case Errc::InvalidPrincipal: return "InvalidPrincipal";
        case Errc::OutOfOrderSample: return "OutOfOrderSample";
        case Errc::UnknownRecipient: return "UnknownRecipient";
        case Errc::DuplicateMessageId: return "DuplicateMessageId";
        case Errc::NoSession: return "NoSession";
        case Errc::UnknownMessage: return "UnknownMessage";
        case Errc::NotDelivered: return "NotDelivered";
        case Errc::AlreadyReacted: return "AlreadyReacted";
        case Errc::DuplicateSession: return "DuplicateSession";
        case Errc::SessionClosed: return "SessionClosed";
        case Errc::PastDeadline: return "PastDeadline";
        case Errc::NotAwaitingConsent: return "NotAwaitingConsent";
        case Errc::IllegalTransition: return "IllegalTransition";
        case Errc::ParseError: return "ParseError";
        case Errc::IncompleteLog: return "IncompleteLog";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::ProtocolError: return "ProtocolError";
        case Errc::AddressInUse: return "AddressInUse";
        case Errc::DataDirUnwritable: return "DataDirUnwritable";
    }
    return "Unknown";
}

}  // namespace wandrelay
