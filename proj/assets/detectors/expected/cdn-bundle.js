// Served from a CDN subdomain of the publisher.
window.__pub = window.__pub || {};
window.__pub.detect = function detect() {return false;};
if (window.__pub.detect()) {
  window.__pub.nag = true;
}
