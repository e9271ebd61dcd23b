#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "spanchain/types.hpp"

namespace spanchain {

/// Optional per-run debug trace: CSV rows "slot,event,node,detail".
class TraceSink {
 public:
  explicit TraceSink(std::ostream& os) : os_(os) { os_ << "slot,event,node,detail\n"; }

  void row(std::uint64_t slot, const std::string& event, NodeId node,
           const std::string& detail = "") {
    os_ << slot << ',' << event << ',';
    if (node == kNoNode) {
      os_ << '-';
    } else {
      os_ << node;
    }
    os_ << ',' << detail << '\n';
  }

 private:
  std::ostream& os_;
};

}  // namespace spanchain
