#ifndef CDOP_IO_HPP
#define CDOP_IO_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "cdop/cd_matrix.hpp"
#include "cdop/errors.hpp"
#include "cdop/hypercomplex.hpp"
#include "cdop/kernel_ops.hpp"
#include "cdop/line_fourier.hpp"
#include "cdop/sequence_ops.hpp"

namespace cdop::io {

using Json = nlohmann::json;

/// ParseError that remembers where in the document it happened (a JSON
/// pointer, or "byte N" for syntax errors).
class LocatedParseError : public ParseError {
 public:
  LocatedParseError(std::string locator, const std::string& what)
      : ParseError(locator + ": " + what), locator_(std::move(locator)) {}
  const std::string& locator() const noexcept { return locator_; }

 private:
  std::string locator_;
};

// {"v": int, "coords": [...]}
Json to_json(const CdNumber& a);
CdNumber number_from_json(const Json& j, const std::string& at = "");
// {"re": CdNumber, "im": CdNumber}
Json to_json(const CdComplex& a);
CdComplex complex_from_json(const Json& j, int level, const std::string& at = "");

/// rows x cols nested arrays; each entry is the 2^{v+1} coordinates (A_v
/// part, then 𝐢 part). Entries may also be read as 2^v coordinates (no 𝐢
/// part), a CdNumber object or a CdComplex object.
Json to_json(const CdMatrix& m);
CdMatrix matrix_from_json(const Json& j, int level, std::size_t rows, std::size_t cols, const std::string& at = "");

/// {"v", "d", "n", "K", "blocks": [[CdMatrix per offset -K..K] per residue]}
Json to_json(const BandPeriodicOp& b);
BandPeriodicOp op_from_json(const Json& j, const std::string& at = "");

/// {"v", "d", "values": [{"l": int, "y": [entry per component]}]}
Json to_json(const SeqFin& x);
SeqFin seq_from_json(const Json& j, const std::string& at = "");

/// {"v", "d", "coeffs": [{"n": int, "matrix": CdMatrix}]}
Json to_json(const PeriodicSeries& x);
PeriodicSeries series_from_json(const Json& j, const std::string& at = "");

/// {"v", "d", "t0", "h", "values": [CdMatrix]}
Json to_json(const LineFunction& f);
LineFunction line_from_json(const Json& j, const std::string& at = "");

/// {"w", "axes", "periods", "v", "d", "kind", "c1", payload}
KernelSpec kernel_from_json(const Json& j, const std::string& at = "");
Json to_json(const KernelSpec& k);

Json to_json(const Error& e);

Json read_json_file(const std::filesystem::path& p);
/// Pretty-printed with a trailing newline; key order is sorted.
std::string dump(const Json& j);
/// Writes to a temporary sibling, then renames over `p`.
void write_atomic(const std::filesystem::path& p, const std::string& content);

}  // namespace cdop::io

#endif  // CDOP_IO_HPP
