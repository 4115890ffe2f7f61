#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <string_view>
#include <vector>

#include "linar/geometry.hpp"
#include "linar/graph.hpp"
#include "linar/imaginary.hpp"

namespace linar {

enum class MessageKind : std::uint8_t { Start, Ngb, Discover, Explore, Confirm, Stat, Beacon, Moved, Report, Command };

inline constexpr std::size_t kMessageKinds = 10;

inline constexpr std::array<std::string_view, kMessageKinds> kMessageKindNames{
    "start", "ngb", "discover", "explore", "confirm", "stat", "beacon", "moved", "report", "command"};

inline std::string_view to_string(MessageKind k) { return kMessageKindNames[static_cast<std::size_t>(k)]; }

/// Identifies one round of one global path search.
struct SearchKey {
  NodeId initiator = 0;
  NodeId source = 0;
  NodeId target = 0;
  int instance = 0;  // per-initiator search counter
  int round = 0;

  auto operator<=>(const SearchKey&) const = default;
  bool operator==(const SearchKey&) const = default;

  /// Same search regardless of round.
  SearchKey base() const { return {initiator, source, target, instance, 0}; }
};

struct InfoEntry {
  NodeId id = 0;
  NodeStatus stat = NodeStatus::Joint;
  double sup = 0.0;
};

/// Byte sizes of the wire schema used for ledger accounting.
namespace wire {
inline constexpr std::size_t header = 4;  // kind + search id / sequence
inline constexpr std::size_t node_id = 2;
inline constexpr std::size_t coord = 4;
inline constexpr std::size_t position = 2 * coord;
inline constexpr std::size_t neighbor_entry = node_id + position;
inline constexpr std::size_t info_entry = 12;
}  // namespace wire

struct Message {
  MessageKind kind = MessageKind::Beacon;
  NodeId sender = 0;  // transmitting node of this hop
  NodeId origin = 0;  // node that created the message

  Position pos{};      // Start position; Moved old position
  Position new_pos{};  // Moved destination
  NodeId replaced = -1;

  std::vector<NodeId> gamma;       // Ngb: neighbour ids
  std::vector<Position> gamma_pos;  // Ngb: their positions
  std::vector<InfoEntry> info;     // Ngb: known status entries

  SearchKey key{};
  std::vector<NodeId> avoid;  // Discover: A
  bool chain = false;         // Confirm: still travelling along the found path
  bool back = false;          // Explore: unicast against a found path; Confirm: aimed at the entry side
  NodeId next_hop = -1;       // unicast hop receiver

  NodeStatus stat = NodeStatus::Joint;
  double sup = 0.0;
  int seq = 0;

  std::size_t payload_count = 0;  // Report/Command: number of node entries carried

  std::size_t wire_size() const {
    using namespace wire;
    switch (kind) {
      case MessageKind::Start: return header + position;
      case MessageKind::Ngb: return header + gamma.size() * neighbor_entry + info.size() * info_entry;
      case MessageKind::Discover: return header + 3 * node_id + avoid.size() * node_id;
      case MessageKind::Explore: return header + 3 * node_id;
      case MessageKind::Confirm: return header + node_id;
      case MessageKind::Stat: return header + node_id + 1 + 4;
      case MessageKind::Beacon: return header;
      case MessageKind::Moved: return header + 2 * position + node_id;
      case MessageKind::Report: return header + node_id + payload_count * neighbor_entry;
      case MessageKind::Command: return header + node_id + position;
    }
    return header;
  }
};

}  // namespace linar
