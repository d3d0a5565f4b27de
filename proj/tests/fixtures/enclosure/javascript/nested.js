function outer(list) {
  function inner(x) {
    return x + 1;
  }
  return list.map((x) => {
    const y = inner(x);
    return y * 2;
  });
}

class A {
  method() {
    class B {
      run() {
        return 1;
      }
    }
    return new B().run();
  }
}
