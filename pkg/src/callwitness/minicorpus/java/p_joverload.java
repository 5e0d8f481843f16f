public class Main {
    static int size(int x) {
        return x;
    }
    static int size(String s) {
        return s.length();
    }
    static int total(int a, String b) {
        return size(a) + size(b);
    }
    public static void main(String[] args) {
        System.out.println(total(4, "abc"));
    }
}
