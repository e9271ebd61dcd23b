#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "spanchain/message.hpp"
#include "spanchain/types.hpp"

namespace spanchain {

struct Block {
  std::uint64_t seq{0};
  std::string prev_hash_hex;
  std::vector<Transaction> txs;  // ordered by (creator, nonce)
  NodeId proposer{kNoNode};
  std::uint64_t epoch{0};
};

using BlockPtr = std::shared_ptr<const Block>;

// SHA-256 over the canonical block serialization, lowercase hex.
std::string block_digest_hex(const Block& b);

/// Hash-chained block list starting from the shared genesis block.
class Blockchain {
 public:
  Blockchain();  // genesis only

  std::size_t size() const { return blocks_.size(); }
  const Block& head() const { return *blocks_.back(); }
  std::uint64_t head_seq() const { return blocks_.back()->seq; }
  const std::string& head_digest() const { return digests_.back(); }
  const BlockPtr& at(std::uint64_t seq) const;  // seq 0 is genesis
  const std::string& digest_at(std::uint64_t seq) const;

  View view() const;  // (seq, digest) of the head, recomputed on demand

  // Appends iff b.seq == head_seq + 1 and b.prev_hash_hex == head digest;
  // otherwise the chain is unchanged and false is returned.
  bool append(BlockPtr b);

  // one line per block: "seq epoch proposer tx_count digest_hex"
  void dump(std::ostream& os) const;

 private:
  std::vector<BlockPtr> blocks_;
  std::vector<std::string> digests_;
};

// Message assembly (MSG): populates data, timestamp, kindred and role.
Message make_msg(MessageData data, std::uint64_t slot, Kindred kindred, RoleInfo role);

// Receiver-side validity: the signer tag matches the claimed identity.
bool msg_signature_ok(const Message& m);

// Valid transactions from the queue, deduplicated by id and ordered by
// (creator, nonce), packed into the block that would extend `bc`.
BlockPtr packup(const MessageQueue& q, const Blockchain& bc, NodeId proposer,
                std::uint64_t epoch);

// Chain suffix from the cut implied by the view queue: i = (f+s)-th highest
// reported seq (counting duplicates), the lowest reported seq when fewer than
// f+s views exist, clamped to [1, head_seq]; empty views give the full chain
// after genesis.
std::vector<BlockPtr> extract(const Blockchain& bc, const MessageQueue& views,
                              std::size_t f, std::size_t s);

enum class UpdateResult { kAlreadyCurrent, kAdvanced, kRecoveryFailed };

// Appends, in order, every suffix block not already present and appendable.
UpdateResult update(Blockchain& bc, const std::vector<BlockPtr>& suffix);

}  // namespace spanchain
