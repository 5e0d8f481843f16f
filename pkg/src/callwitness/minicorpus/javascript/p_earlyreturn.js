function classify(n) {
  if (n < 0) {
    return "neg";
  }
  if (n === 0) {
    return "zero";
  }
  return "pos";
}
function tag(n) {
  return n + ":" + classify(n);
}
function describeAll(xs) {
  const out = [];
  for (let i = 0; i < xs.length; i++) {
    out.push(tag(xs[i]));
  }
  return out.join(" ");
}
console.log(describeAll([-1, 0, 5]));
