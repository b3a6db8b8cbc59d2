#include "mrb/pauli.hpp"

#include <array>
#include <stdexcept>

namespace mrb {

char letter_char(PauliLetter p) {
    static const char tab[4] = {'I', 'X', 'Y', 'Z'};
    return tab[static_cast<int>(p)];
}

PauliLetter letter_from_char(char c) {
    switch (c) {
        case 'I': case 'i': return PauliLetter::I;
        case 'X': case 'x': return PauliLetter::X;
        case 'Y': case 'y': return PauliLetter::Y;
        case 'Z': case 'z': return PauliLetter::Z;
    }
    throw std::invalid_argument("bad Pauli letter");
}

bool PauliString::is_identity_letters() const {
    for (auto l : letters)
        if (l != PauliLetter::I) return false;
    return true;
}

std::string PauliString::str() const {
    static const char* ph[4] = {"+", "+i", "-", "-i"};
    std::string out = ph[phase_exp];
    for (auto l : letters) out += letter_char(l);
    return out;
}

PauliString PauliString::from_str(const std::string& s) {
    PauliString p;
    size_t i = 0;
    int sign = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        if (s[i] == '-') sign = 2;
        ++i;
    }
    // optional imaginary unit ("i" followed by at least one letter char that is
    // upper-case; a lone lower-case 'i' right after the sign means the phase)
    if (i + 1 <= s.size() && s[i] == 'i' && i + 1 < s.size()) {
        sign = (sign + 1) % 4;
        ++i;
    }
    for (; i < s.size(); ++i) p.letters.push_back(letter_from_char(s[i]));
    p.phase_exp = static_cast<uint8_t>(sign);
    return p;
}

bool operator==(const PauliString& a, const PauliString& b) {
    return a.phase_exp == b.phase_exp && a.letters == b.letters;
}

namespace {
// prod_letter[a][b] and prod_phase[a][b]: a·b = i^phase · letter
constexpr uint8_t kProdLetter[4][4] = {
    {0, 1, 2, 3},
    {1, 0, 3, 2},
    {2, 3, 0, 1},
    {3, 2, 1, 0},
};
// phases as exponents of i: X·Y=iZ, Y·Z=iX, Z·X=iY; reversed order gives -i.
constexpr uint8_t kProdPhase[4][4] = {
    {0, 0, 0, 0},
    {0, 0, 1, 3},
    {0, 3, 0, 1},
    {0, 1, 3, 0},
};
}  // namespace

PauliString pauli_mul(const PauliString& a, const PauliString& b) {
    if (a.n() != b.n()) throw std::invalid_argument("pauli_mul: size mismatch");
    PauliString out(a.n());
    int phase = a.phase_exp + b.phase_exp;
    for (int q = 0; q < a.n(); ++q) {
        int la = static_cast<int>(a.letters[q]);
        int lb = static_cast<int>(b.letters[q]);
        out.letters[q] = static_cast<PauliLetter>(kProdLetter[la][lb]);
        phase += kProdPhase[la][lb];
    }
    out.phase_exp = static_cast<uint8_t>(phase % 4);
    return out;
}

bool letters_anticommute(PauliLetter a, PauliLetter b) {
    if (a == PauliLetter::I || b == PauliLetter::I) return false;
    return a != b;
}

bool commute(const PauliString& a, const PauliString& b) {
    if (a.n() != b.n()) throw std::invalid_argument("commute: size mismatch");
    int anti = 0;
    for (int q = 0; q < a.n(); ++q)
        if (letters_anticommute(a.letters[q], b.letters[q])) ++anti;
    return (anti % 2) == 0;
}

bool anticommutes(const PauliString& a, PauliLetter axis) {
    if (a.n() != 1) throw std::invalid_argument("anticommutes: expected a single letter");
    return letters_anticommute(a.letters[0], axis);
}

}  // namespace mrb
