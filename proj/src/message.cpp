#include "spanchain/message.hpp"

#include <set>

namespace spanchain {

MessageData MessageData::of_view(NodeId signer, View v) {
  MessageData d;
  d.kind = PayloadKind::kView;
  d.signer = signer;
  d.view = std::move(v);
  return d;
}

MessageData MessageData::of_tx(NodeId signer, Transaction t) {
  MessageData d;
  d.kind = PayloadKind::kTransaction;
  d.signer = signer;
  d.tx = std::move(t);
  return d;
}

MessageData MessageData::of_control(NodeId signer, std::string text) {
  MessageData d;
  d.kind = PayloadKind::kControl;
  d.signer = signer;
  d.control = std::move(text);
  return d;
}

bool MessageQueue::add(const Message& m) { return entries_.insert(m).second; }

void MessageQueue::merge(const MessageQueue& other) {
  for (const Message& m : other.entries_) entries_.insert(m);
}

bool MessageQueue::contains_data(const MessageData& d) const {
  for (const Message& m : entries_) {
    if (m.data == d) return true;
  }
  return false;
}

std::size_t MessageQueue::matching_signers(const MessageData& d) const {
  std::set<NodeId> signers;
  for (const Message& m : entries_) {
    if (m.data.kind == d.kind && m.data.view == d.view && m.data.tx == d.tx &&
        m.data.control == d.control) {
      signers.insert(m.data.signer);
    }
  }
  return signers.size();
}

}  // namespace spanchain
