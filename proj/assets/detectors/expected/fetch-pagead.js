// Requests the ad-serving endpoint directly and reports failures.
function flagAdblock(reason) {}

fetch("https://pagead2.googlesyndication.com/pagead/js/adsbygoogle.js", { mode: "no-cors" })
  .then(function () {})
  .catch(function (e) { flagAdblock(String(e)); });
