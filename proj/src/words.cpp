#include "dubois/words.hpp"

#include <algorithm>
#include <cctype>

#include "json.hpp"

namespace dubois {

Word free_reduce(Word w) {
  Word out;
  out.reserve(w.size());
  for (const Letter& l : w) {
    if (!out.empty() && out.back().gen == l.gen && out.back().sign == -l.sign) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

bool is_freely_reduced(const Word& w) {
  for (size_t i = 1; i < w.size(); ++i) {
    if (w[i].gen == w[i - 1].gen && w[i].sign == -w[i - 1].sign) return false;
  }
  return true;
}

Word word_inverse(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    out.push_back({it->gen, -it->sign});
  }
  return out;
}

Word word_concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return free_reduce(std::move(out));
}

Word parse_word(const std::string& text, const std::vector<char>& generators) {
  Word w;
  w.reserve(text.size());
  for (char c : text) {
    const char low = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const auto it = std::find(generators.begin(), generators.end(), low);
    if (it == generators.end()) {
      throw SchemaError(std::string("unknown generator letter '") + c + "' in word \"" + text + "\"");
    }
    const int idx = static_cast<int>(it - generators.begin());
    w.push_back({idx, std::islower(static_cast<unsigned char>(c)) ? 1 : -1});
  }
  return free_reduce(std::move(w));
}

std::string word_to_string(const Word& w, const std::vector<char>& generators) {
  std::string s;
  s.reserve(w.size());
  for (const Letter& l : w) {
    char c = generators.at(l.gen);
    if (l.sign < 0) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    s.push_back(c);
  }
  return s;
}

Quat evaluate_word(const Word& w, const std::vector<Quat>& images) {
  Quat acc = Quat::identity();
  int since_renorm = 0;
  for (const Letter& l : w) {
    if (l.gen < 0 || l.gen >= static_cast<int>(images.size())) {
      throw IndexError("evaluate_word: generator index out of range");
    }
    acc = acc * (l.sign > 0 ? images[l.gen] : images[l.gen].inverse());
    if (++since_renorm == 16) {
      acc = acc.normalized();
      since_renorm = 0;
    }
  }
  return acc.normalized();
}

FoxDerivative fox_derivative(const Word& r, int gen) {
  FoxDerivative d;
  Word prefix;
  for (const Letter& l : r) {
    if (l.gen == gen) {
      if (l.sign > 0) {
        d.terms.push_back({+1, prefix});
      } else {
        Word p = prefix;
        p.push_back(l);  // prefix * x^-1
        d.terms.push_back({-1, std::move(p)});
      }
    }
    prefix.push_back(l);
  }
  return d;
}

Mat3 instantiate_fox(const FoxDerivative& d, const std::vector<Quat>& images) {
  Mat3 m = Mat3::Zero();
  for (const auto& term : d.terms) {
    m += term.sign * adjoint_matrix(evaluate_word(term.prefix, images));
  }
  return m;
}

namespace {

// All 2^(k-1) relator orientations, stopping at the first that makes the
// commutator identity hold in the free group.
bool peripheral_identity_holds(const Presentation& p, std::vector<int>& orientation_out) {
  const Word lhs = free_reduce(word_concat(
      word_concat(p.longitude, p.meridian),
      word_concat(word_inverse(p.longitude), word_inverse(p.meridian))));
  const int m = static_cast<int>(p.relators.size());
  if (m > 20) throw SchemaError("too many relators for peripheral check");
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    Word rhs;
    for (int j = 0; j < m; ++j) {
      const int o = (mask >> j) & 1u ? -1 : +1;
      const Word r = o > 0 ? p.relators[j] : word_inverse(p.relators[j]);
      Word piece = word_concat(word_concat(p.peripheral[j].s, r), word_inverse(p.peripheral[j].s));
      piece = word_concat(piece,
                          word_concat(word_concat(p.peripheral[j].t, word_inverse(r)),
                                      word_inverse(p.peripheral[j].t)));
      rhs = word_concat(rhs, piece);
    }
    if (rhs == lhs) {
      orientation_out.assign(m, +1);
      for (int j = 0; j < m; ++j) {
        if ((mask >> j) & 1u) orientation_out[j] = -1;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

Presentation parse_presentation(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("document must be a JSON object");
  for (const char* key : {"generators", "relators", "meridian", "longitude", "peripheral"}) {
    if (!doc.contains(key)) throw SchemaError(std::string("missing key \"") + key + "\"");
  }

  Presentation p;
  if (!doc["generators"].is_array()) throw SchemaError("\"generators\" must be an array");
  for (const auto& g : doc["generators"]) {
    if (!g.is_string() || g.get<std::string>().size() != 1) {
      throw SchemaError("generators must be single-letter strings");
    }
    const char c = g.get<std::string>()[0];
    if (!std::islower(static_cast<unsigned char>(c))) {
      throw SchemaError("generators must be lowercase letters");
    }
    if (std::find(p.generator_names.begin(), p.generator_names.end(), c) != p.generator_names.end()) {
      throw SchemaError("duplicate generator");
    }
    p.generator_names.push_back(c);
  }
  p.generator_count = static_cast<int>(p.generator_names.size());
  if (p.generator_count < 2) {
    throw SchemaError("need at least 2 generators (deficiency-one knot presentation)");
  }

  if (!doc["relators"].is_array()) throw SchemaError("\"relators\" must be an array");
  for (const auto& r : doc["relators"]) {
    if (!r.is_string()) throw SchemaError("relators must be strings");
    p.relators.push_back(parse_word(r.get<std::string>(), p.generator_names));
  }
  if (static_cast<int>(p.relators.size()) != p.generator_count - 1) {
    throw SchemaError("expected exactly k-1 relators (deficiency one)");
  }

  if (!doc["meridian"].is_string() || !doc["longitude"].is_string()) {
    throw SchemaError("\"meridian\" and \"longitude\" must be strings");
  }
  p.meridian = parse_word(doc["meridian"].get<std::string>(), p.generator_names);
  p.longitude = parse_word(doc["longitude"].get<std::string>(), p.generator_names);

  if (!doc["peripheral"].is_array() ||
      doc["peripheral"].size() != p.relators.size()) {
    throw SchemaError("\"peripheral\" must list one {s, t} pair per relator");
  }
  for (const auto& pair : doc["peripheral"]) {
    if (!pair.is_object() || !pair.contains("s") || !pair.contains("t")) {
      throw SchemaError("peripheral entries must be {\"s\": ..., \"t\": ...}");
    }
    p.peripheral.push_back({parse_word(pair["s"].get<std::string>(), p.generator_names),
                            parse_word(pair["t"].get<std::string>(), p.generator_names)});
  }

  if (!peripheral_identity_holds(p, p.peripheral_orientation)) {
    throw PeripheralError(
        "l m l^-1 m^-1 does not reduce to the given commutator decomposition "
        "(tried both relator orientations)");
  }
  if (doc.contains("name") && doc["name"].is_string()) {
    p.name = doc["name"].get<std::string>();
  }
  return p;
}

const char* builtin_trefoil_json() {
  return R"({
  "name": "trefoil",
  "generators": ["x", "y"],
  "relators": ["xxYYY"],
  "meridian": "xY",
  "longitude": "xxyXyXyXyXyXyX",
  "peripheral": [{"s": "x", "t": "xY"}]
})";
}

Presentation builtin_presentation(const std::string& name) {
  if (name == "trefoil") return parse_presentation(builtin_trefoil_json());
  throw SchemaError("unknown builtin presentation \"" + name + "\"");
}

}  // namespace dubois
