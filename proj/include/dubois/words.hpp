#pragma once

#include <string>
#include <vector>

#include "dubois/su2.hpp"

namespace dubois {

// One letter of a free-group word: generator index (0-based) and sign.
struct Letter {
  int gen = 0;
  int sign = 1;  // +1 generator, -1 inverse
  bool operator==(const Letter&) const = default;
};

// Freely reduced word over the generators. The string form uses lowercase
// for generators and uppercase for inverses ("xxYYY" = x^2 y^-3).
using Word = std::vector<Letter>;

Word free_reduce(Word w);
Word word_inverse(const Word& w);
Word word_concat(const Word& a, const Word& b);
bool is_freely_reduced(const Word& w);

// Parse against a generator alphabet (single lowercase letters).
Word parse_word(const std::string& text, const std::vector<char>& generators);
std::string word_to_string(const Word& w, const std::vector<char>& generators);

// Product of the assigned images and inverses in order; empty word is the
// identity. Renormalizes every 16 products to guard drift.
Quat evaluate_word(const Word& w, const std::vector<Quat>& images);

// Integral group-ring element: signed sum of word prefixes.
struct FoxDerivative {
  struct Term {
    int sign = 1;
    Word prefix;
  };
  std::vector<Term> terms;
};

// Left convention: d(uv)/dx = du/dx + u dv/dx, d(x)/dx = 1, d(x^-1)/dx = -x^-1.
FoxDerivative fox_derivative(const Word& r, int gen);

// Adjoint instantiation: sum of sign * Ad(evaluate_word(prefix)).
Mat3 instantiate_fox(const FoxDerivative& d, const std::vector<Quat>& images);

// Deficiency-one presentation with peripheral (boundary torus) data.
struct Presentation {
  int generator_count = 0;
  std::vector<char> generator_names;
  std::vector<Word> relators;  // exactly k-1 of them
  Word meridian;
  Word longitude;
  struct Peripheral {
    Word s, t;
  };
  std::vector<Peripheral> peripheral;
  // Orientation of each relator inside the commutator decomposition, as
  // found by the free-reduction check (+1 as given, -1 inverted).
  std::vector<int> peripheral_orientation;
  std::string name = "presentation";
};

// Parse and validate a presentation document (UTF-8 JSON). Throws
// SchemaError on malformed documents and PeripheralError when
// l m l^-1 m^-1 != prod_j (s_j r_j s_j^-1)(t_j r_j^-1 t_j^-1) freely.
Presentation parse_presentation(const std::string& json_text);

// Resolve "trefoil" to the built-in document (longitude x^2 (y x^-1)^6).
Presentation builtin_presentation(const std::string& name);
const char* builtin_trefoil_json();

}  // namespace dubois
