#pragma once

#include <cstdint>
#include <string>

#include "uljam/phy.hpp"

namespace uljam {

enum class EventKind : uint8_t {
  RachAttempt,       // detail: attempt number
  AccessRejected,    // RNTI pool exhausted
  RarIssued,         // detail: msg3 subframe
  Msg3Received,
  Connected,         // detail: 1 if fresh connection, 0 if reestablished
  ProcedureFailed,   // detail: attempt number
  Rlf,               // detail: consecutive failures at detection
  ReestablishStart,  // detail: previous rnti
  FreshConnectStart, // total-loss escape; detail: abandoned rnti
  BackoffEnter,      // detail: backoff duration in subframes
  Barred,            // detail: barring duration in subframes
  Crashed,
  RntiHop,           // detail: old rnti
  HopSkipped,        // RNTI pool exhausted at hop time
  FallbackEnter,     // UCI moved to PUSCH
  FallbackExit,
  ContextSuspended,  // detail: rnti
  ContextReleased,   // detail: rnti
  LinkAdaptDown,     // detail: new mcs index
  LinkAdaptUp,       // detail: new mcs index
};

const char* event_kind_name(EventKind kind);

struct Event {
  SubframeIndex subframe = 0;
  EventKind kind = EventKind::RachAttempt;
  uint16_t rnti = 0;
  int64_t detail = 0;
};

inline const char* event_kind_name(EventKind kind)
{
  switch (kind) {
    case EventKind::RachAttempt: return "rach_attempt";
    case EventKind::AccessRejected: return "access_rejected";
    case EventKind::RarIssued: return "rar_issued";
    case EventKind::Msg3Received: return "msg3_received";
    case EventKind::Connected: return "connected";
    case EventKind::ProcedureFailed: return "procedure_failed";
    case EventKind::Rlf: return "rlf";
    case EventKind::ReestablishStart: return "reestablish_start";
    case EventKind::FreshConnectStart: return "fresh_connect_start";
    case EventKind::BackoffEnter: return "backoff_enter";
    case EventKind::Barred: return "barred";
    case EventKind::Crashed: return "crashed";
    case EventKind::RntiHop: return "rnti_hop";
    case EventKind::HopSkipped: return "hop_skipped";
    case EventKind::FallbackEnter: return "fallback_enter";
    case EventKind::FallbackExit: return "fallback_exit";
    case EventKind::ContextSuspended: return "context_suspended";
    case EventKind::ContextReleased: return "context_released";
    case EventKind::LinkAdaptDown: return "link_adapt_down";
    case EventKind::LinkAdaptUp: return "link_adapt_up";
  }
  return "unknown";
}

} // namespace uljam
