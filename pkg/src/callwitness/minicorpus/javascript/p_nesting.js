function outer(n) {
  function inner(k) {
    return k * 2;
  }
  function twice(k) {
    return inner(inner(k));
  }
  return twice(n);
}
console.log(outer(3));
