#include "apna/crypto/certificate.hpp"

#include <cstring>

#include "apna/error.hpp"

namespace apna {

ByteArray<kCertificateBodySize> CertificateBody::encode() const {
  ByteArray<kCertificateBodySize> out{};
  auto* p = out.data();
  const auto e = ephid.bytes();
  std::memcpy(p, e.data(), 16);
  store_u32(p + 16, exp_time);
  std::memcpy(p + 20, pubkey.data(), 32);
  store_u32(p + 52, aid.value);
  const auto aa = aa_ephid.bytes();
  std::memcpy(p + 56, aa.data(), 16);
  return out;
}

ByteArray<kCertificateSize> EphIdCertificate::encode() const {
  ByteArray<kCertificateSize> out{};
  const auto b = body.encode();
  std::memcpy(out.data(), b.data(), b.size());
  std::memcpy(out.data() + kCertificateBodySize, signature.data(), signature.size());
  return out;
}

EphIdCertificate EphIdCertificate::decode(ByteView data) {
  if (data.size() != kCertificateSize) {
    throw Error(Errc::MalformedMessage,
                "certificate must be " + std::to_string(kCertificateSize) + " bytes, got " + std::to_string(data.size()));
  }
  const auto* p = data.data();
  EphIdCertificate cert;
  cert.body.ephid = EphId::from_bytes(data.subspan(0, 16));
  cert.body.exp_time = load_u32(p + 16);
  std::memcpy(cert.body.pubkey.data(), p + 20, 32);
  cert.body.aid = Aid{load_u32(p + 52)};
  cert.body.aa_ephid = EphId::from_bytes(data.subspan(56, 16));
  std::memcpy(cert.signature.data(), p + kCertificateBodySize, 64);
  return cert;
}

EphIdCertificate sign_certificate(const crypto::SigningKey& as_signing_key, const CertificateBody& body) {
  return EphIdCertificate{body, as_signing_key.sign(body.encode())};
}

bool verify_certificate(const crypto::PublicKey& as_signing_public, const EphIdCertificate& cert) {
  return crypto::ed25519_verify(as_signing_public, cert.body.encode(), cert.signature);
}

}  // namespace apna
