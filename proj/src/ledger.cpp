#include "spanchain/ledger.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace spanchain {

namespace {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr ||
      EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

BlockPtr genesis_block() {
  auto g = std::make_shared<Block>();
  g->seq = 0;
  g->prev_hash_hex = std::string(64, '0');
  g->proposer = kNoNode;
  g->epoch = 0;
  return g;
}

}  // namespace

std::string block_digest_hex(const Block& b) {
  std::ostringstream os;
  os << "blk|" << b.seq << '|' << b.prev_hash_hex << '|' << b.proposer << '|'
     << b.epoch << '|' << b.txs.size();
  for (const Transaction& tx : b.txs) {
    os << "|tx|" << tx.id.creator << ',' << tx.id.epoch << ',' << tx.id.nonce
       << ',' << (tx.valid ? 1 : 0) << ',' << tx.payload.size() << ','
       << tx.payload;
  }
  return sha256_hex(os.str());
}

Blockchain::Blockchain() {
  BlockPtr g = genesis_block();
  digests_.push_back(block_digest_hex(*g));
  blocks_.push_back(std::move(g));
}

const BlockPtr& Blockchain::at(std::uint64_t seq) const {
  if (seq >= blocks_.size()) throw std::out_of_range("blockchain: seq out of range");
  return blocks_[seq];
}

const std::string& Blockchain::digest_at(std::uint64_t seq) const {
  if (seq >= digests_.size()) throw std::out_of_range("blockchain: seq out of range");
  return digests_[seq];
}

View Blockchain::view() const { return View{head_seq(), head_digest()}; }

bool Blockchain::append(BlockPtr b) {
  if (!b) throw std::invalid_argument("blockchain: null block");
  if (b->seq != head_seq() + 1) return false;
  if (b->prev_hash_hex != head_digest()) return false;
  digests_.push_back(block_digest_hex(*b));
  blocks_.push_back(std::move(b));
  return true;
}

void Blockchain::dump(std::ostream& os) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Block& b = *blocks_[i];
    os << b.seq << ' ' << b.epoch << ' ';
    if (b.proposer == kNoNode) {
      os << '-';
    } else {
      os << b.proposer;
    }
    os << ' ' << b.txs.size() << ' ' << digests_[i] << '\n';
  }
}

Message make_msg(MessageData data, std::uint64_t slot, Kindred kindred,
                 RoleInfo role) {
  Message m;
  m.data = std::move(data);
  m.timestamp = slot;
  m.kindred = kindred;
  m.role = role;
  return m;
}

bool msg_signature_ok(const Message& m) {
  return m.data.signer == m.kindred.self && m.data.signer != kNoNode;
}

BlockPtr packup(const MessageQueue& q, const Blockchain& bc, NodeId proposer,
                std::uint64_t epoch) {
  std::map<TxId, Transaction> txs;
  for (const Message& m : q) {
    if (m.data.kind != PayloadKind::kTransaction) continue;
    if (!m.data.tx.valid) continue;
    txs.emplace(m.data.tx.id, m.data.tx);
  }
  auto b = std::make_shared<Block>();
  b->seq = bc.head_seq() + 1;
  b->prev_hash_hex = bc.head_digest();
  b->proposer = proposer;
  b->epoch = epoch;
  b->txs.reserve(txs.size());
  for (auto& [id, tx] : txs) b->txs.push_back(std::move(tx));
  std::sort(b->txs.begin(), b->txs.end(), [](const Transaction& a, const Transaction& t) {
    if (a.id.creator != t.id.creator) return a.id.creator < t.id.creator;
    if (a.id.nonce != t.id.nonce) return a.id.nonce < t.id.nonce;
    return a.id.epoch < t.id.epoch;
  });
  return b;
}

std::vector<BlockPtr> extract(const Blockchain& bc, const MessageQueue& views,
                              std::size_t f, std::size_t s) {
  std::vector<std::uint64_t> seqs;
  for (const Message& m : views) {
    if (m.data.kind == PayloadKind::kView) seqs.push_back(m.data.view.seq);
  }

  std::uint64_t cut;
  if (seqs.empty()) {
    cut = 1;  // maximally conservative: everything after genesis
  } else if (seqs.size() < f + s) {
    cut = *std::min_element(seqs.begin(), seqs.end());
  } else {
    std::sort(seqs.begin(), seqs.end(), std::greater<>());
    cut = seqs[f + s - 1];
  }
  cut = std::max<std::uint64_t>(cut, 1);
  cut = std::min<std::uint64_t>(cut, bc.head_seq());

  std::vector<BlockPtr> suffix;
  for (std::uint64_t seq = cut; seq <= bc.head_seq() && bc.head_seq() > 0; ++seq) {
    suffix.push_back(bc.at(seq));
  }
  return suffix;
}

UpdateResult update(Blockchain& bc, const std::vector<BlockPtr>& suffix) {
  bool advanced = false;
  for (const BlockPtr& b : suffix) {
    if (!b) throw std::invalid_argument("update: null block in suffix");
    if (b->seq <= bc.head_seq()) {
      if (block_digest_hex(*b) != bc.digest_at(b->seq)) {
        // same position, different block: this suffix can never link here
        return UpdateResult::kRecoveryFailed;
      }
      continue;
    }
    if (!bc.append(b)) {
      return advanced ? UpdateResult::kAdvanced : UpdateResult::kRecoveryFailed;
    }
    advanced = true;
  }
  if (advanced) return UpdateResult::kAdvanced;
  if (!suffix.empty() && suffix.back()->seq > bc.head_seq()) {
    return UpdateResult::kRecoveryFailed;
  }
  return UpdateResult::kAlreadyCurrent;
}

}  // namespace spanchain
