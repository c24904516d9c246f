#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "uljam/dci.hpp"
#include "uljam/phy.hpp"

namespace uljam {

/// Random Access Response. Broadcast on the downlink, so visible to
/// every synchronized observer including jammers. The Msg3 allocation
/// obeys msg3_subframe = rar_subframe + 4 + msg3_offset.
struct RarGrant {
  uint32_t preamble_id = 0;
  Rnti assigned_rnti;
  SubframeIndex msg3_subframe = 0;
  uint32_t msg3_rb_start = 0;
  uint32_t msg3_rb_len = 0;
};

enum class UlTxType : uint8_t { Data, Msg3, Preamble, Pucch };

/// One uplink transmission in one subframe.
struct UplinkTx {
  UlTxType type = UlTxType::Data;
  int ue_index = 0;
  Rnti rnti;
  uint32_t rb_start = 0;
  uint32_t rb_len = 0;
  PowerDb tx_power_db = 0.0;  // received level at the eNB, TPC applied
  int mcs_index = 0;          // decode threshold for Data/Msg3

  // Data fields
  uint8_t harq_id = 0;
  bool is_retx = false;
  bool is_control = false;  // connection-completion message
  uint32_t n_packets = 0;
  uint32_t bsr_bytes = 0;   // buffer status after loading this block

  // Preamble fields
  uint32_t preamble_id = 0;
  std::optional<Rnti> reestablish_rnti;
};

struct UlRxResult {
  UplinkTx tx;
  bool decoded = false;
  PowerDb sinr_db = 0.0;
};

/// Downlink HARQ feedback plus piggybacked control notifications,
/// delivered reliably (downlink jamming is out of scope).
struct Feedback {
  Rnti rnti;
  uint8_t harq_id = 0;
  bool ack = false;
  bool block_dropped = false;  // retransmission budget exhausted
  bool connection_complete = false;
  PowerDb tpc_offset_db = 0.0;
  PowerDb sinr_db = 0.0;  // measured at the eNB for this block
};

/// Downlink broadcast of one subframe as seen by UEs and eavesdroppers.
struct DownlinkBroadcast {
  std::vector<EncodedDci> dcis;
  std::vector<RarGrant> rars;
};

} // namespace uljam
