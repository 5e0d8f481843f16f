public class Main {
    static class Inner {
        int twice(int k) {
            return k * 2;
        }
        int quad(int k) {
            return this.twice(this.twice(k));
        }
    }
    static int run(int n) {
        Inner inner = new Inner();
        return inner.quad(n);
    }
    public static void main(String[] args) {
        System.out.println(run(3));
    }
}
