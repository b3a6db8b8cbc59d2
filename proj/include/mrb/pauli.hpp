#pragma once
// Signed n-qubit Pauli operators and the little algebra the compiler needs.

#include <cstdint>
#include <string>
#include <vector>

namespace mrb {

// Letters are encoded I=0, X=1, Y=2, Z=3.
enum class PauliLetter : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char letter_char(PauliLetter p);
PauliLetter letter_from_char(char c);

// phase_exp is the exponent k in i^k, k in {0,1,2,3}.
struct PauliString {
    std::vector<PauliLetter> letters;
    uint8_t phase_exp = 0;

    PauliString() = default;
    explicit PauliString(int n) : letters(n, PauliLetter::I) {}
    PauliString(std::vector<PauliLetter> ls, uint8_t phase = 0)
        : letters(std::move(ls)), phase_exp(phase) {}

    int n() const { return static_cast<int>(letters.size()); }
    bool is_identity_letters() const;
    std::string str() const;  // e.g. "-iXZY"

    static PauliString from_str(const std::string& s);  // "XZY" or "+XZY", "-iXY"...
    static PauliString identity(int n) { return PauliString(n); }
};

bool operator==(const PauliString& a, const PauliString& b);

// Signed product a·b. Throws std::invalid_argument on size mismatch.
PauliString pauli_mul(const PauliString& a, const PauliString& b);

// Letterwise anticommutation of two single-qubit letters (I commutes with all).
bool letters_anticommute(PauliLetter a, PauliLetter b);

// true iff the full strings commute (parity of letterwise anticommutations).
bool commute(const PauliString& a, const PauliString& b);

// Single-qubit letter test against an axis letter; a must be one letter.
bool anticommutes(const PauliString& a, PauliLetter axis);

}  // namespace mrb
