#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "txlr/sampling.hpp"
#include "txlr/tensor.hpp"

namespace txlr {

// KTEN container:
//   bytes 0..7   "KTEN0001"
//   bytes 8..11  header length, unsigned 32-bit little-endian
//   header       UTF-8 JSON {"dims":[Nkx,Nky,NRx,NTx],"dtype":"c64"|"c128",
//                "order":"kx-fastest","meta":{...}}
//   payload      interleaved (real, imag) little-endian IEEE values, kx
//                fastest, then ky, rx, tx

enum class Dtype { C64, C128 };

struct KtenData {
  KSpaceTensor tensor;
  nlohmann::json meta;
  Dtype dtype = Dtype::C128;
};

std::string encode_kten(const KSpaceTensor &t, const nlohmann::json &meta = nlohmann::json::object(),
                        Dtype dtype = Dtype::C128);
/// Throws BadMagicError, UnknownDtypeError, LengthMismatchError or FormatError.
KtenData decode_kten(std::string_view bytes);

void write_kten(const KSpaceTensor &t, const std::filesystem::path &path,
                const nlohmann::json &meta = nlohmann::json::object(), Dtype dtype = Dtype::C128);
KtenData read_kten(const std::filesystem::path &path);

/// Mask stored as a 0/1 tensor of dims [Nkx, Nky, 1, planes] with
/// R_target, R_achieved, seed and radius in the header meta.
void write_mask(const SamplingMask &m, const std::filesystem::path &path, nlohmann::json meta = nlohmann::json::object());
SamplingMask read_mask(const std::filesystem::path &path);
SamplingMask mask_from_kten(const KtenData &k);

}  // namespace txlr
