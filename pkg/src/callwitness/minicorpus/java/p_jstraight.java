public class Main {
    static int add(int a, int b) {
        return a + b;
    }
    static int scale(int x) {
        return add(x, x);
    }
    public static void main(String[] args) {
        System.out.println(add(2, 3));
        System.out.println(scale(7));
    }
}
