use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// Is n a sum of three integer squares?
///
/// By Legendre's three-square theorem the answer is no exactly when
/// n = 4^a(8k+7), i.e. when ν_2(n) is even and the odd part is ≡ 7 mod 8,
/// or equivalently ℓ_{4,2}(n) ∈ {7, 15}.
pub fn three_squares_representable(n: &BigUint) -> bool {
    if n.is_zero() {
        return true;
    }
    let nu2 = n.trailing_zeros().unwrap();
    if nu2 % 2 == 1 {
        // ℓ_{4,2} is even, never 7 or 15
        return true;
    }
    let odd = n >> nu2;
    let low = (&odd % BigUint::from(8u32)).to_u64().unwrap();
    low != 7
}
