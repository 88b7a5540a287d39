#ifndef GED_CHECKPOINT_HPP
#define GED_CHECKPOINT_HPP

#include <string>
#include <vector>

#include "ged/tensor.hpp"

namespace ged {

struct NamedTensor {
  std::string name;
  Tensor value;
};

struct Checkpoint {
  std::string meta;  // free-form, typically a JSON config blob
  std::vector<NamedTensor> arrays;
};

// Binary container: magic, format version, a metadata string, then named
// arrays as (name, rows, cols, row-major doubles). All integers and doubles
// are little-endian regardless of host, so files round-trip bit for bit
// across machines. Loading rejects bad magic, unsupported versions and
// truncated files with a descriptive error.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace ged

#endif
