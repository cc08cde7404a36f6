#pragma once

// Short-lived EphID certificates signed by the issuing AS (Ed25519).
//
//   offset  size  field
//   0       16    ephid
//   16      4     exp_time (unix seconds, big-endian)
//   20      32    pubkey   X25519 public key bound to the EphID
//   52      4     aid      issuing AS
//   56      16    aa_ephid EphID of the issuing AS's accountability agent
//   72      64    signature over bytes [0, 72)

#include "apna/bytes.hpp"
#include "apna/crypto/ephid.hpp"
#include "apna/crypto/primitives.hpp"

namespace apna {

inline constexpr std::size_t kCertificateBodySize = 72;
inline constexpr std::size_t kCertificateSize = kCertificateBodySize + 64;

struct CertificateBody {
  EphId ephid;
  UnixTime exp_time = 0;
  crypto::PublicKey pubkey{};
  Aid aid;
  EphId aa_ephid;

  ByteArray<kCertificateBodySize> encode() const;
  friend bool operator==(const CertificateBody&, const CertificateBody&) = default;
};

struct EphIdCertificate {
  CertificateBody body;
  crypto::Signature signature{};

  ByteArray<kCertificateSize> encode() const;
  /// Requires exactly 136 bytes; throws Error{MalformedMessage}.
  static EphIdCertificate decode(ByteView data);
  friend bool operator==(const EphIdCertificate&, const EphIdCertificate&) = default;
};

EphIdCertificate sign_certificate(const crypto::SigningKey& as_signing_key, const CertificateBody& body);
/// Never throws; any mismatch is false.
bool verify_certificate(const crypto::PublicKey& as_signing_public, const EphIdCertificate& cert);

}  // namespace apna
