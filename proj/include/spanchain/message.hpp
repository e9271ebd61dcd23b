#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <string>

#include "spanchain/types.hpp"

namespace spanchain {

enum class Role : std::uint8_t { kFollower, kCollector, kLeader };

enum class PayloadKind : std::uint8_t { kView, kTransaction, kControl };

struct View {
  std::uint64_t seq{0};
  std::string hash_hex;

  auto operator<=>(const View&) const = default;
};

struct TxId {
  NodeId creator{kNoNode};
  std::uint64_t epoch{0};
  std::uint64_t nonce{0};

  auto operator<=>(const TxId&) const = default;
};

struct Transaction {
  TxId id;
  std::string payload;
  bool valid{true};

  auto operator<=>(const Transaction&) const = default;
};

/// The signed payload of a message: the content plus the signer tag. The tag
/// is the simulated signature; receivers check it structurally.
struct MessageData {
  PayloadKind kind{PayloadKind::kControl};
  NodeId signer{kNoNode};
  View view;            // kind == kView
  Transaction tx;       // kind == kTransaction
  std::string control;  // kind == kControl

  auto operator<=>(const MessageData&) const = default;

  static MessageData of_view(NodeId signer, View v);
  static MessageData of_tx(NodeId signer, Transaction t);
  static MessageData of_control(NodeId signer, std::string text);
};

struct Kindred {
  NodeId self{kNoNode};
  NodeId parent{kNoNode};

  auto operator<=>(const Kindred&) const = default;
};

struct RoleInfo {
  Role role{Role::kFollower};
  int level{0};

  auto operator<=>(const RoleInfo&) const = default;
};

struct Message {
  MessageData data;
  std::uint64_t timestamp{0};  // slot index at creation
  Kindred kindred;
  RoleInfo role;
};

/// Ordered, deduplicated message container. Two messages are the same entry
/// when they share (signer, timestamp, data).
class MessageQueue {
 public:
  bool add(const Message& m);            // false if it was a duplicate
  void merge(const MessageQueue& other); // set union

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool contains_data(const MessageData& d) const;
  // distinct signers whose message data equals d (one vote per node)
  std::size_t matching_signers(const MessageData& d) const;

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  struct Less {
    bool operator()(const Message& a, const Message& b) const {
      if (a.data.signer != b.data.signer) return a.data.signer < b.data.signer;
      if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
      return a.data < b.data;
    }
  };
  std::set<Message, Less> entries_;
};

}  // namespace spanchain
