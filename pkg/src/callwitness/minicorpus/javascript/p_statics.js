class MathBox {
  static square(x) {
    return x * x;
  }
  static sumSquares(a, b) {
    return MathBox.square(a) + MathBox.square(b);
  }
}
function describe(a, b) {
  return "sum=" + MathBox.sumSquares(a, b);
}
console.log(describe(3, 4));
