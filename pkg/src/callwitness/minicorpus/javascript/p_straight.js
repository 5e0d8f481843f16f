function add(a, b) {
  return a + b;
}
function scale(x) {
  return add(x, x);
}
function total(xs) {
  let sum = 0;
  for (let i = 0; i < xs.length; i++) {
    sum = add(sum, xs[i]);
  }
  return sum;
}
console.log(total([1, 2, 3]));
console.log(scale(5));
