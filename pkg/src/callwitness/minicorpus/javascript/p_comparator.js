function byLengthDown(a, b) {
  return b.length - a.length;
}
function byText(a, b) {
  if (a < b) {
    return -1;
  }
  if (a > b) {
    return 1;
  }
  return 0;
}
function rank(words) {
  const copy = words.slice();
  copy.sort(byLengthDown);
  return copy;
}
function alphabetize(words) {
  const copy = words.slice();
  copy.sort(byText);
  return copy;
}
console.log(rank(["pea", "squash", "kale"]).join(","));
console.log(alphabetize(["pea", "squash", "kale"]).join(","));
