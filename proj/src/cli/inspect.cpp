#include "apna/cli/inspect.hpp"

#include <cstdio>
#include <vector>

#include "apna/crypto/certificate.hpp"
#include "apna/error.hpp"
#include "apna/wire/packet.hpp"
#include "json.hpp"

namespace apna::cli {
namespace {

struct Field {
  std::size_t offset;
  std::string name;
  std::string value;
};

std::size_t expected_size(InspectKind kind) {
  switch (kind) {
    case InspectKind::Header: return wire::kHeaderSize;
    case InspectKind::EphId: return kEphIdSize;
    case InspectKind::Cert: return kCertificateSize;
    case InspectKind::Gre: return wire::kGrePrefixSize + wire::kHeaderSize;
  }
  return 0;
}

std::string_view kind_name(InspectKind kind) {
  switch (kind) {
    case InspectKind::Header: return "header";
    case InspectKind::EphId: return "ephid";
    case InspectKind::Cert: return "cert";
    case InspectKind::Gre: return "gre";
  }
  return "?";
}

std::string hex(ByteView b) { return to_hex(b); }
std::string ip(std::uint32_t v) {
  return std::to_string(v >> 24) + "." + std::to_string((v >> 16) & 0xff) + "." + std::to_string((v >> 8) & 0xff) +
         "." + std::to_string(v & 0xff);
}

void header_fields(std::vector<Field>& out, std::size_t base, const wire::ApnaHeader& h) {
  using namespace wire::offset;
  out.push_back({base + kSrcAid, "src_aid", std::to_string(h.src_aid.value)});
  out.push_back({base + kSrcEphId, "src_ephid", hex(h.src_ephid.bytes())});
  out.push_back({base + kDstAid, "dst_aid", std::to_string(h.dst_aid.value)});
  out.push_back({base + kDstEphId, "dst_ephid", hex(h.dst_ephid.bytes())});
  out.push_back({base + kMac, "mac", hex(h.mac)});
  out.push_back({base + kNonce, "nonce", std::to_string(h.nonce)});
}

std::vector<Field> fields(InspectKind kind, ByteView bytes) {
  const auto need = expected_size(kind);
  if (bytes.size() < need)
    throw Error(Errc::ParseError, "truncated " + std::string(kind_name(kind)) + ": " + std::to_string(bytes.size()) +
                                      " of " + std::to_string(need) + " bytes, " +
                                      std::to_string(need - bytes.size()) + " missing at offset " +
                                      std::to_string(bytes.size()));
  const bool exact = kind == InspectKind::EphId || kind == InspectKind::Cert;
  if (exact && bytes.size() != need)
    throw Error(Errc::ParseError, std::to_string(bytes.size() - need) + " trailing bytes at offset " +
                                      std::to_string(need) + " after " + std::string(kind_name(kind)));

  std::vector<Field> out;
  switch (kind) {
    case InspectKind::Header: {
      const auto h = wire::decode_header(bytes);
      header_fields(out, 0, h);
      if (bytes.size() > wire::kHeaderSize)
        out.push_back({wire::kHeaderSize, "payload_length", std::to_string(bytes.size() - wire::kHeaderSize)});
      break;
    }
    case InspectKind::EphId: {
      const auto e = EphId::from_bytes(bytes);
      out.push_back({0, "ciphertext", hex(e.ct)});
      out.push_back({8, "iv", hex(e.iv)});
      out.push_back({12, "tag", hex(e.tag)});
      break;
    }
    case InspectKind::Cert: {
      const auto c = EphIdCertificate::decode(bytes);
      out.push_back({0, "ephid", hex(c.body.ephid.bytes())});
      out.push_back({16, "exp_time", std::to_string(c.body.exp_time)});
      out.push_back({20, "pubkey", hex(c.body.pubkey)});
      out.push_back({52, "aid", std::to_string(c.body.aid.value)});
      out.push_back({56, "aa_ephid", hex(c.body.aa_ephid.bytes())});
      out.push_back({kCertificateBodySize, "signature", hex(c.signature)});
      break;
    }
    case InspectKind::Gre: {
      wire::GreFrame g;
      try {
        g = wire::decode_gre(bytes);
      } catch (const Error& e) {
        if (e.code() == Errc::UnknownProtocolType)
          throw Error(Errc::ParseError, "unknown protocol type at offset 8: 0x" + hex(bytes.subspan(8, 2)));
        throw;
      }
      out.push_back({0, "outer_src_ip", ip(g.outer_src_ip)});
      out.push_back({4, "outer_dst_ip", ip(g.outer_dst_ip)});
      char proto[8];
      std::snprintf(proto, sizeof proto, "0x%04X", g.protocol_type);
      out.push_back({8, "protocol_type", proto});
      header_fields(out, wire::kGrePrefixSize, g.header);
      out.push_back({wire::kGrePrefixSize + wire::kHeaderSize, "payload_length", std::to_string(g.payload.size())});
      break;
    }
  }
  return out;
}

}  // namespace

InspectKind parse_inspect_kind(std::string_view name) {
  if (name == "header") return InspectKind::Header;
  if (name == "ephid") return InspectKind::EphId;
  if (name == "cert") return InspectKind::Cert;
  if (name == "gre") return InspectKind::Gre;
  throw Error(Errc::ParseError, "unknown kind '" + std::string(name) + "'");
}

std::string inspect(InspectKind kind, ByteView bytes) {
  std::string out;
  char line[32];
  for (const auto& f : fields(kind, bytes)) {
    std::snprintf(line, sizeof line, "%4zu  %-15s ", f.offset, f.name.c_str());
    out += line + f.value + "\n";
  }
  return out;
}

std::string inspect_json(InspectKind kind, ByteView bytes) {
  nlohmann::json j{{"kind", kind_name(kind)}, {"fields", nlohmann::json::array()}};
  for (const auto& f : fields(kind, bytes))
    j["fields"].push_back({{"offset", f.offset}, {"name", f.name}, {"value", f.value}});
  return j.dump();
}

}  // namespace apna::cli
