#include "txlr/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace txlr {

namespace {

constexpr std::string_view kMagic = "KTEN0001";

template <class U>
void put_le(std::string &out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <class U>
U get_le(const unsigned char *p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

std::size_t value_size(Dtype d) { return d == Dtype::C64 ? 4 : 8; }

}  // namespace

std::string encode_kten(const KSpaceTensor &t, const nlohmann::json &meta, Dtype dtype) {
  const auto &d = t.dims();
  nlohmann::json header = {{"dims", {d.nkx, d.nky, d.nrx, d.ntx}},
                           {"dtype", dtype == Dtype::C64 ? "c64" : "c128"},
                           {"order", "kx-fastest"},
                           {"meta", meta.is_null() ? nlohmann::json::object() : meta}};
  const std::string text = header.dump();
  std::string out(kMagic);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  out.reserve(out.size() + static_cast<std::size_t>(t.size()) * 2 * value_size(dtype));
  for (const cplx v : t.values()) {
    if (dtype == Dtype::C64) {
      put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v.real())));
      put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v.imag())));
    } else {
      put_le(out, std::bit_cast<std::uint64_t>(v.real()));
      put_le(out, std::bit_cast<std::uint64_t>(v.imag()));
    }
  }
  return out;
}

KtenData decode_kten(std::string_view bytes) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw BadMagicError("not a KTEN file (bad magic)");
  }
  if (bytes.size() < kMagic.size() + 4) throw LengthMismatchError("KTEN file truncated inside the header length");
  const auto *raw = reinterpret_cast<const unsigned char *>(bytes.data());
  const auto header_len = get_le<std::uint32_t>(raw + kMagic.size());
  const std::size_t payload_at = kMagic.size() + 4 + header_len;
  if (bytes.size() < payload_at) throw LengthMismatchError("KTEN file truncated inside the header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(kMagic.size() + 4, header_len));
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(std::string("KTEN header is not valid JSON: ") + e.what());
  }
  if (!header.contains("dims") || !header["dims"].is_array() || header["dims"].size() != 4) {
    throw FormatError("KTEN header needs dims [Nkx, Nky, NRx, NTx]");
  }
  const std::string dtype_name = header.value("dtype", "");
  Dtype dtype;
  if (dtype_name == "c64") {
    dtype = Dtype::C64;
  } else if (dtype_name == "c128") {
    dtype = Dtype::C128;
  } else {
    throw UnknownDtypeError("unknown KTEN dtype '" + dtype_name + "'");
  }
  if (header.value("order", "kx-fastest") != "kx-fastest") throw FormatError("unsupported KTEN axis order");

  Dims4 dims;
  try {
    dims = {header["dims"][0].get<Index>(), header["dims"][1].get<Index>(), header["dims"][2].get<Index>(),
            header["dims"][3].get<Index>()};
  } catch (const nlohmann::json::exception &) {
    throw FormatError("KTEN dims must be integers");
  }
  if (dims.nkx < 1 || dims.nky < 1 || dims.nrx < 1 || dims.ntx < 1) throw FormatError("KTEN dims must be >= 1");

  const std::size_t vsize = value_size(dtype);
  const std::size_t expected = 2 * vsize * static_cast<std::size_t>(dims.size());
  const std::size_t actual = bytes.size() - payload_at;
  if (actual != expected) {
    throw LengthMismatchError("KTEN payload is " + std::to_string(actual) + " bytes, dims " + to_string(dims) +
                              " need " + std::to_string(expected));
  }

  std::vector<cplx> values(static_cast<std::size_t>(dims.size()));
  const unsigned char *p = raw + payload_at;
  for (auto &v : values) {
    if (dtype == Dtype::C64) {
      v = {std::bit_cast<float>(get_le<std::uint32_t>(p)), std::bit_cast<float>(get_le<std::uint32_t>(p + 4))};
    } else {
      v = {std::bit_cast<double>(get_le<std::uint64_t>(p)), std::bit_cast<double>(get_le<std::uint64_t>(p + 8))};
    }
    p += 2 * vsize;
  }
  return {KSpaceTensor(dims, std::move(values)), header.value("meta", nlohmann::json::object()), dtype};
}

void write_kten(const KSpaceTensor &t, const std::filesystem::path &path, const nlohmann::json &meta, Dtype dtype) {
  const std::string bytes = encode_kten(t, meta, dtype);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to " + path.string() + " failed");
}

KtenData read_kten(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_kten(buf.str());
}

void write_mask(const SamplingMask &m, const std::filesystem::path &path, nlohmann::json meta) {
  KSpaceTensor t(Dims4{m.nkx(), m.nky(), 1, m.ntx()});
  for (Index tx = 0; tx < m.ntx(); ++tx)
    for (Index ky = 0; ky < m.nky(); ++ky)
      for (Index kx = 0; kx < m.nkx(); ++kx) t(kx, ky, 0, tx) = m(kx, ky, tx) ? 1.0 : 0.0;
  meta["kind"] = "mask";
  meta["R_target"] = m.r_target();
  meta["R_achieved"] = m.r_achieved();
  meta["seed"] = m.seed();
  meta["radius"] = m.radius();
  write_kten(t, path, meta, Dtype::C64);
}

SamplingMask mask_from_kten(const KtenData &k) {
  const auto &d = k.tensor.dims();
  if (d.nrx != 1) throw FormatError("mask tensors must have a single receive plane");
  std::vector<unsigned char> bits(static_cast<std::size_t>(d.nkx * d.nky * d.ntx));
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = k.tensor.values()[i] != cplx{} ? 1 : 0;
  const double r_target = k.meta.value("R_target", 0.0);
  const std::uint64_t seed = k.meta.value("seed", std::uint64_t{0});
  std::vector<double> radius = k.meta.value("radius", std::vector<double>{});
  SamplingMask m(d.nkx, d.nky, d.ntx, std::move(bits), r_target, seed, std::move(radius));
  return r_target > 0.0 ? m : SamplingMask(m.nkx(), m.nky(), m.ntx(), std::vector<unsigned char>(m.bits().begin(), m.bits().end()), m.r_achieved(), seed);
}

SamplingMask read_mask(const std::filesystem::path &path) { return mask_from_kten(read_kten(path)); }

}  // namespace txlr
