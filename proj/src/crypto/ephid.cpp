#include "apna/crypto/ephid.hpp"

#include <algorithm>
#include <cstring>
#include <string_view>

#include "apna/error.hpp"

namespace apna {

namespace {
crypto::Block label_block(std::string_view label) {
  crypto::Block b{};
  std::memcpy(b.data(), label.data(), std::min(label.size(), b.size()));
  return b;
}
}  // namespace

AsSubkeys derive_as_subkeys(const AsSecretKey& master) {
  crypto::Aes128 prf(master.bytes);
  return AsSubkeys{prf.encrypt_block(label_block("ephid-enc")), prf.encrypt_block(label_block("ephid-mac"))};
}

ByteArray<kEphIdSize> EphId::bytes() const {
  ByteArray<kEphIdSize> out{};
  std::memcpy(out.data(), ct.data(), 8);
  std::memcpy(out.data() + 8, iv.data(), 4);
  std::memcpy(out.data() + 12, tag.data(), 4);
  return out;
}

EphId EphId::from_bytes(ByteView data) {
  if (data.size() != kEphIdSize) {
    throw Error(Errc::MalformedMessage, "EphID must be 16 bytes, got " + std::to_string(data.size()));
  }
  EphId e;
  std::memcpy(e.ct.data(), data.data(), 8);
  std::memcpy(e.iv.data(), data.data() + 8, 4);
  std::memcpy(e.tag.data(), data.data() + 12, 4);
  return e;
}

EphIdCodec::EphIdCodec(const AsSubkeys& subkeys) : enc_(subkeys.enc), mac_(subkeys.mac) {}

ByteArray<4> EphIdCodec::tag_for(const ByteArray<8>& ct, const ByteArray<4>& iv) const {
  crypto::Block input{};
  std::memcpy(input.data(), ct.data(), 8);
  std::memcpy(input.data() + 8, iv.data(), 4);
  // Single-block CBC-MAC with a zero IV is one block encryption.
  const auto full = mac_.encrypt_block(input);
  ByteArray<4> tag;
  std::memcpy(tag.data(), full.data(), 4);
  return tag;
}

EphId EphIdCodec::mint(Hid hid, UnixTime exp_time, std::uint32_t iv) const {
  EphId out;
  store_u32(out.iv.data(), iv);
  crypto::Block counter{};
  std::memcpy(counter.data(), out.iv.data(), 4);
  const auto keystream = enc_.encrypt_block(counter);
  crypto::Block plain{};
  store_u32(plain.data(), hid.value);
  store_u32(plain.data() + 4, exp_time);
  for (int i = 0; i < 8; ++i) out.ct[i] = plain[i] ^ keystream[i];
  out.tag = tag_for(out.ct, out.iv);
  return out;
}

std::optional<EphIdContents> EphIdCodec::try_open(const EphId& ephid) const noexcept {
  if (!crypto::constant_time_equal(tag_for(ephid.ct, ephid.iv), ephid.tag)) return std::nullopt;
  crypto::Block counter{};
  std::memcpy(counter.data(), ephid.iv.data(), 4);
  const auto keystream = enc_.encrypt_block(counter);
  std::uint8_t plain[8];
  for (int i = 0; i < 8; ++i) plain[i] = ephid.ct[i] ^ keystream[i];
  return EphIdContents{Hid{load_u32(plain)}, load_u32(plain + 4)};
}

EphIdContents EphIdCodec::open(const EphId& ephid) const {
  auto r = try_open(ephid);
  if (!r) throw Error(Errc::AuthenticationFailure, "EphID tag mismatch");
  return *r;
}

EphId mint_ephid(const AsSubkeys& subkeys, Hid hid, UnixTime exp_time, std::uint32_t iv) {
  return EphIdCodec(subkeys).mint(hid, exp_time, iv);
}

EphIdContents open_ephid(const AsSubkeys& subkeys, const EphId& ephid) { return EphIdCodec(subkeys).open(ephid); }

std::size_t EphIdHash::operator()(const EphId& e) const noexcept {
  // The tag is a keyed pseudo-random value; ct adds the rest of the entropy.
  std::uint64_t a = load_u64(e.ct.data());
  std::uint64_t b = (std::uint64_t{load_u32(e.iv.data())} << 32) | load_u32(e.tag.data());
  return static_cast<std::size_t>(a ^ (b * 0x9E3779B97F4A7C15ULL));
}

}  // namespace apna
